/**
 * Backend agreement: the UI's JSON boundary and the CLI must report identical
 * metrics for identical serialized inputs (to 9 significant digits), and a
 * full-size image round trip must stay interactive. Spawns the real analysis
 * server and CLI, so these are end-to-end checks of the whole stack.
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { httpTransport } from "../src/client.js";
import { qEntry, type AnalysisResult, type Vec2 } from "../src/contract.js";

const execFileP = promisify(execFile);
const PYTHON = process.env.PYTHON ?? "python3";
const S_RANGE = [2, 3, 4, 5, 6, 7, 8];

let server: ChildProcess;
let baseUrl: string;
let workDir: string;

function p9(x: number | string): string {
  return Number(x).toPrecision(9);
}

async function runCli(args: string[]): Promise<{ header: string[]; rows: string[][] }> {
  const { stdout } = await execFileP(PYTHON, ["-m", "imt2d.cli", ...args], { cwd: workDir });
  const lines = stdout
    .split("\n")
    .filter((line) => line.length > 0 && !line.startsWith("#"));
  const header = lines[0]!.split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  return { header, rows };
}

function column(header: string[], row: string[], name: string): string {
  const idx = header.indexOf(name);
  expect(idx, `column ${name}`).toBeGreaterThanOrEqual(0);
  return row[idx]!;
}

/** Compare one CSV row against a result's q entries to 9 significant digits. */
function expectAgreement(header: string[], row: string[], result: AnalysisResult): void {
  expect(p9(column(header, row, "area"))).toBe(p9(result.area));
  expect(p9(column(header, row, "perimeter"))).toBe(p9(result.perimeter));
  for (const s of S_RANGE) {
    const entry = qEntry(result, s);
    expect(entry, `q${s} present`).toBeDefined();
    const csvQ = column(header, row, `q${s}`);
    const csvArg = column(header, row, `arg${s}`);
    if (entry!.magnitude === null) {
      expect(csvQ).toBe("");
    } else {
      expect(p9(csvQ)).toBe(p9(entry!.magnitude));
    }
    if (entry!.direction === null) {
      expect(csvArg).toBe("");
    } else {
      expect(p9(csvArg)).toBe(p9(entry!.direction));
    }
  }
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "morphometer-"));
  server = spawn(PYTHON, ["-m", "imt2d.server", "--port", "0", "--root", workDir]);
  baseUrl = await new Promise<string>((resolve, reject) => {
    let text = "";
    const timer = setTimeout(() => reject(new Error(`server did not start: ${text}`)), 15000);
    server.stderr!.on("data", (chunk: Buffer) => {
      text += chunk.toString();
      const m = /serving on (http:\/\/[\d.]+:\d+)\//.exec(text);
      if (m) {
        clearTimeout(timer);
        resolve(m[1]!);
      }
    });
    server.on("error", reject);
    server.on("exit", (code) => reject(new Error(`server exited early with ${code}: ${text}`)));
  });
}, 30000);

afterAll(() => {
  server?.kill();
});

describe("UI-CLI agreement", () => {
  it("triangle polygon metrics agree to 9 significant digits", async () => {
    const vertices: Vec2[] = [
      [0, 0],
      [4, 0],
      [2, 3],
    ];
    writeFileSync(join(workDir, "tri.txt"), vertices.map(([x, y]) => `${x} ${y}`).join("\n") + "\n");
    const { header, rows } = await runCli(["polygon", "--in", "tri.txt", "--smax", "8"]);
    expect(rows).toHaveLength(1);

    const transport = httpTransport(baseUrl);
    const result = await transport({ mode: "polygon", payload: { vertices }, s_max: 8 });
    expectAgreement(header, rows[0]!, result);
  }, 30000);

  it("point-lattice per-cell metrics agree row by row", async () => {
    const points: Vec2[] = [];
    for (let j = 0; j < 5; j++) {
      for (let i = 0; i < 5; i++) points.push([i, j]);
    }
    const fileText =
      "# box -0.5 -0.5 4.5 4.5\n" + points.map(([x, y]) => `${x} ${y}`).join("\n") + "\n";
    writeFileSync(join(workDir, "lattice.txt"), fileText);
    const { header, rows } = await runCli(["points", "--in", "lattice.txt", "--smax", "8"]);
    expect(rows).toHaveLength(25);

    const transport = httpTransport(baseUrl);
    const result = await transport({
      mode: "points",
      payload: { points, box: [-0.5, -0.5, 4.5, 4.5], boundary: "clip" },
      s_max: 8,
    });
    expect(result.per_cell).toHaveLength(25);

    rows.forEach((row, i) => {
      expect(p9(column(header, row, "x"))).toBe(p9(points[i]![0]));
      expect(p9(column(header, row, "y"))).toBe(p9(points[i]![1]));
      const cell = result.per_cell![i]!;
      for (const s of S_RANGE) {
        const entry = cell.q.find((e) => e.s === s)!;
        const csvQ = column(header, row, `q${s}`);
        if (entry.magnitude === null) {
          expect(csvQ).toBe("");
        } else {
          expect(p9(csvQ)).toBe(p9(entry.magnitude));
        }
      }
    });
    // interior cells of the unit lattice are unit squares
    const centerCell = result.per_cell![12]!;
    expect(centerCell.q.find((e) => e.s === 4)!.magnitude!).toBeGreaterThan(1 - 1e-9);
  }, 30000);

  it("image metrics agree between an uploaded raster and the CLI's PNG read", async () => {
    // deterministic 16x16 pattern, written as a real PNG for the CLI
    const width = 16;
    const height = 16;
    const script = [
      "import numpy as np",
      "from PIL import Image",
      `a = np.fromfunction(lambda y, x: (7 * x + 13 * y) % 256, (${height}, ${width}))`,
      `Image.fromarray(a.astype('uint8'), 'L').save(r'${join(workDir, "pattern.png")}')`,
    ].join("; ");
    await execFileP(PYTHON, ["-c", script]);

    const values: number[] = [];
    for (let y = 0; y < height; y++) {
      for (let x = 0; x < width; x++) values.push(((7 * x + 13 * y) % 256) / 255);
    }

    const { header, rows } = await runCli([
      "image",
      "--in",
      "pattern.png",
      "--thresholds",
      "0.5",
      "--smax",
      "8",
    ]);
    expect(rows).toHaveLength(1);

    const transport = httpTransport(baseUrl);
    const result = await transport({
      mode: "image",
      payload: { width, height, values, threshold: 0.5 },
      s_max: 8,
    });
    expectAgreement(header, rows[0]!, result);
  }, 30000);
});

describe("interactivity budget", () => {
  it("a 500x500 image threshold update round-trips in under a second", async () => {
    const side = 500;
    // small deterministic LCG so the fixture needs no dependencies
    let state = 12345;
    const values = Array.from({ length: side * side }, () => {
      state = (state * 1103515245 + 12345) & 0x7fffffff;
      return state / 0x7fffffff;
    });
    const transport = httpTransport(baseUrl);
    for (const threshold of [0.4, 0.6]) {
      const start = performance.now();
      const result = await transport({
        mode: "image",
        payload: { width: side, height: side, values, threshold },
        s_max: 8,
      });
      const elapsed = performance.now() - start;
      expect(result.perimeter).toBeGreaterThan(0);
      expect(elapsed).toBeLessThan(1000);
    }
  }, 30000);

  it("over-limit payloads come back as friendly errors", async () => {
    const side = 501;
    const transport = httpTransport(baseUrl);
    await expect(
      transport({
        mode: "image",
        payload: { width: side, height: side, values: new Array(side * side).fill(0), threshold: 0.5 },
        s_max: 8,
      }),
    ).rejects.toThrow(/not supported/);
  }, 30000);
});
