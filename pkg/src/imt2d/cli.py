"""Command-line batch analysis.

Four subcommands cover the library surface:

* ``polygon`` — shape metrics of one CCW polygon from a vertex file,
* ``image``   — threshold sweep over a PNG's excursion sets,
* ``points``  — per-Voronoi-cell metrics of a point pattern,
* ``map``     — space-resolved grid analysis of a PNG.

Output is CSV on stdout or ``--out``, preceded by ``#`` comment lines echoing
the effective configuration.  The entire output is rendered in memory before
anything is written, so failed runs never leave partial files behind.  Exit
codes: 0 success, 1 invalid input, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .core import DEFAULT_S_MAX, imt_polygon
from .errors import InvalidInputError, NoDirectionError, UndefinedMetricError
from .io import (
    CHANNEL_SELECTORS,
    ResultRow,
    format_cell_results,
    format_results,
    load_image,
    read_points,
    read_polygon,
)
from .marching import MarchingSquaresConfig, minkowski_map, threshold_sweep
from .voronoi import BOUNDARY_POLICIES, analyze_point_pattern


@dataclass
class RunConfig:
    subcommand: str
    in_path: str
    out_path: str | None = None
    s_max: int = DEFAULT_S_MAX
    thresholds: str | None = None
    channel: str = "luma"
    boundary: str = "clip"
    grid: str | None = None
    close_border: bool = False
    serial: bool = False


def parse_threshold_spec(text: str) -> list[float]:
    """Thresholds from "a,b,c" lists or inclusive "min:max:count" ranges."""
    text = text.strip()
    if not text:
        raise InvalidInputError("empty threshold spec")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidInputError(f"range spec must be min:max:count, got {text!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise InvalidInputError(f"unreadable range spec {text!r}") from None
        if count < 1:
            raise InvalidInputError("range spec needs count >= 1")
        if lo > hi:
            raise InvalidInputError(f"range spec has min {lo:g} > max {hi:g}")
        if count == 1:
            return [lo]
        step = (hi - lo) / (count - 1)
        return [lo + i * step for i in range(count - 1)] + [hi]
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidInputError(f"unreadable threshold list {text!r}") from None
    if not values:
        raise InvalidInputError("empty threshold spec")
    return values


def _grid_dims(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise InvalidInputError(f"grid must be COLSxROWS, got {text!r}")
    try:
        cols, rows = int(parts[0]), int(parts[1])
    except ValueError:
        raise InvalidInputError(f"grid must be COLSxROWS, got {text!r}") from None
    if cols < 1 or rows < 1:
        raise InvalidInputError("grid dimensions must be positive")
    return cols, rows


def _echo_lines(config: RunConfig) -> list[str]:
    # --out and --serial are deliberately not echoed: neither changes the
    # analysis, and the same run must produce byte-identical output.
    parts = [f"# imt2d {config.subcommand} --in {config.in_path}", f"--smax {config.s_max}"]
    if config.subcommand in ("image", "map"):
        parts.append(f"--thresholds {config.thresholds} --channel {config.channel}")
        if config.close_border:
            parts.append("--close-border")
    if config.subcommand == "map":
        parts.append(f"--grid {config.grid}")
    if config.subcommand == "points":
        parts.append(f"--boundary {config.boundary}")
    return [" ".join(parts)]


def _q_triples(acc, s_max):
    triples = []
    for s in range(2, s_max + 1):
        try:
            mag = acc.msm(s)
        except UndefinedMetricError:
            triples.append((s, None, None))
            continue
        try:
            direction = acc.preferred_direction(s)
        except NoDirectionError:
            direction = None
        triples.append((s, mag, direction))
    return triples


def _render(config: RunConfig) -> str:
    s_max = config.s_max
    if s_max < 2:
        raise InvalidInputError("--smax must be at least 2")

    if config.subcommand == "polygon":
        vertices = read_polygon(config.in_path)
        acc = imt_polygon(vertices, s_max=s_max)
        rows = [ResultRow(Path(config.in_path).stem, None, acc.area(), acc.perimeter(), _q_triples(acc, s_max))]
        body = format_results(rows, s_max=s_max)

    elif config.subcommand == "image":
        if not config.thresholds:
            raise InvalidInputError("image mode requires --thresholds")
        ts = sorted(parse_threshold_spec(config.thresholds))
        image = load_image(config.in_path, channel=config.channel)
        label = Path(config.in_path).stem
        swept = threshold_sweep(
            image,
            ts,
            s_max=s_max,
            close_border=config.close_border,
            parallel=not config.serial,
        )
        rows = [
            ResultRow(label, t, acc.area(), acc.perimeter(), _q_triples(acc, s_max))
            for t, acc in swept
        ]
        body = format_results(rows, s_max=s_max)

    elif config.subcommand == "map":
        if not config.thresholds:
            raise InvalidInputError("map mode requires --thresholds")
        if not config.grid:
            raise InvalidInputError("map mode requires --grid COLSxROWS")
        cols, grid_rows = _grid_dims(config.grid)
        ts = sorted(parse_threshold_spec(config.thresholds))
        image = load_image(config.in_path, channel=config.channel)
        rows = []
        for t in ts:
            cfg = MarchingSquaresConfig(t, s_max=s_max, close_border=config.close_border)
            grid = minkowski_map(image, cfg, cols, grid_rows)
            for r in range(grid.rows):
                for c in range(grid.cols):
                    acc = grid.cell(r, c)
                    rows.append(
                        ResultRow(f"cell_{r}_{c}", t, acc.area(), acc.perimeter(), _q_triples(acc, s_max))
                    )
        body = format_results(rows, s_max=s_max)

    elif config.subcommand == "points":
        if config.boundary not in BOUNDARY_POLICIES:
            raise InvalidInputError(
                f"unknown boundary policy {config.boundary!r}; choose from {BOUNDARY_POLICIES}"
            )
        ps = read_points(config.in_path)
        results = analyze_point_pattern(ps, policy=config.boundary, s_max=s_max)
        body = format_cell_results(results, s_max=s_max)

    else:
        raise InvalidInputError(f"unknown subcommand {config.subcommand!r}")

    return "\n".join(_echo_lines(config)) + "\n" + body


def run(config: RunConfig) -> int:
    """Execute one analysis; returns the process exit code."""
    try:
        text = _render(config)
    except OSError as exc:
        print(f"imt2d: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"imt2d: {exc}", file=sys.stderr)
        return 1

    if config.out_path is None:
        sys.stdout.write(text)
        return 0
    try:
        with open(config.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"imt2d: {exc}", file=sys.stderr)
        return 2
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imt2d", description="2D shape anisotropy metrics")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--in", dest="in_path", required=True, help="input file")
        p.add_argument("--out", dest="out_path", default=None, help="output CSV (default: stdout)")
        p.add_argument("--smax", dest="s_max", type=int, default=DEFAULT_S_MAX, help="highest tensor rank")

    p = sub.add_parser("polygon", help="analyze one polygon from a vertex file")
    common(p)

    for name, help_text in (
        ("image", "threshold sweep over a PNG"),
        ("map", "space-resolved grid analysis of a PNG"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--thresholds", required=True, help='"a,b,c" list or "min:max:count" range')
        p.add_argument("--channel", default="luma", choices=CHANNEL_SELECTORS)
        p.add_argument("--close-border", dest="close_border", action="store_true", help="close contours along the frame")
        p.add_argument("--serial", action="store_true", help="disable parallel threshold analysis")
        if name == "map":
            p.add_argument("--grid", required=True, help="grid as COLSxROWS, e.g. 4x4")

    p = sub.add_parser("points", help="per-Voronoi-cell analysis of a point file")
    common(p)
    p.add_argument("--boundary", default="clip", choices=BOUNDARY_POLICIES)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return run(RunConfig(**vars(args)))


if __name__ == "__main__":
    sys.exit(main())
