"""Local HTTP transport for the JSON analysis boundary.

``imt2d-serve`` hosts two things on one port: POST /analyze wired straight to
:func:`imt2d.bindings.analyze_request`, and (optionally) a static frontend
directory on /.  Permissive CORS headers are sent so a separately served dev
frontend can talk to it; the server binds to localhost by default and is a
development tool, not a hardened deployment target.
"""

from __future__ import annotations

import argparse
import json
import sys
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

from .bindings import analyze_request

MAX_BODY_BYTES = 32 * 1024 * 1024


class AnalysisHandler(SimpleHTTPRequestHandler):
    def __init__(self, *args, quiet=False, **kwargs):
        self._quiet = quiet
        super().__init__(*args, **kwargs)

    def log_message(self, fmt, *args):
        if not self._quiet:
            super().log_message(fmt, *args)

    def end_headers(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        super().end_headers()

    def do_OPTIONS(self):
        self.send_response(204)
        self.end_headers()

    def _send_json(self, status: int, obj) -> None:
        body = json.dumps(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if self.path.rstrip("/") != "/analyze":
            self._send_json(404, {"error": f"no such endpoint {self.path!r}"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            length = -1
        if length <= 0 or length > MAX_BODY_BYTES:
            self._send_json(400, {"error": "request body missing or too large"})
            return
        try:
            request = json.loads(self.rfile.read(length))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            self._send_json(400, {"error": f"invalid JSON: {exc}"})
            return
        try:
            result = analyze_request(request)
        except ValueError as exc:
            self._send_json(400, {"error": str(exc)})
            return
        self._send_json(200, result)


def serve(port: int = 8787, host: str = "127.0.0.1", root: str | None = None, quiet: bool = False):
    """Build (and return) the configured HTTP server; caller runs serve_forever."""
    handler = partial(AnalysisHandler, directory=root or ".", quiet=quiet)
    return ThreadingHTTPServer((host, port), handler)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="imt2d-serve", description="serve the JSON analysis API")
    parser.add_argument("--port", type=int, default=8787)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--root", default=None, help="static frontend directory to serve on /")
    args = parser.parse_args(argv)
    httpd = serve(port=args.port, host=args.host, root=args.root)
    # report the bound port, which differs from --port when asking for port 0
    print(f"serving on http://{args.host}:{httpd.server_address[1]}/ (POST /analyze)", file=sys.stderr, flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
