"""Read-only HTTP server for the browser UI.

Serves the analysis outputs (`/api/model`, `/api/layout`), raw source
files (`/api/source?file=...`, path-traversal guarded), and static UI
assets at `/`.  Nothing under the output or input directories is ever
mutated.
"""

from __future__ import annotations

import json
import mimetypes
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

_FALLBACK_INDEX = """<!doctype html>
<html><head><title>varscope</title></head>
<body>
<h1>varscope analysis server</h1>
<p>No UI build found. Endpoints:</p>
<ul>
<li><a href="/api/model">/api/model</a></li>
<li><a href="/api/layout">/api/layout</a></li>
<li>/api/source?file=&lt;relative-path&gt;</li>
</ul>
<p>Build the frontend and pass --ui-dir to serve it here.</p>
</body></html>
"""


def make_server(
    output_dir: Path,
    port: int = 0,
    ui_dir: Path | None = None,
    source_root: Path | None = None,
) -> ThreadingHTTPServer:
    output_dir = Path(output_dir)
    if source_root is None:
        try:
            meta = json.loads((output_dir / "model.json").read_text())["meta"]
            source_root = Path(meta.get("input_root", "."))
        except (OSError, json.JSONDecodeError, KeyError):
            source_root = Path(".")
    if ui_dir is None and (output_dir / "ui").is_dir():
        ui_dir = output_dir / "ui"
    resolved_root = source_root.resolve()
    resolved_ui = ui_dir.resolve() if ui_dir is not None else None

    class Handler(BaseHTTPRequestHandler):
        server_version = "varscope"

        def log_message(self, format, *args):  # noqa: A002 - stdlib signature
            pass

        def do_GET(self):  # noqa: N802 - stdlib naming
            parsed = urlparse(self.path)
            route = parsed.path
            if route == "/api/model":
                self._send_file(output_dir / "model.json", "application/json")
            elif route == "/api/layout":
                self._send_file(output_dir / "layout.json", "application/json")
            elif route == "/api/source":
                self._send_source(parse_qs(parsed.query))
            else:
                self._send_static(route)

        def _send_source(self, query) -> None:
            values = query.get("file")
            if not values:
                self._error(400, "missing file parameter")
                return
            candidate = (resolved_root / values[0]).resolve()
            if candidate != resolved_root and resolved_root not in candidate.parents:
                self._error(403, "file is outside the analyzed tree")
                return
            if not candidate.is_file():
                self._error(404, "no such source file")
                return
            self._send_bytes(candidate.read_bytes(), "text/plain; charset=utf-8")

        def _send_static(self, route: str) -> None:
            if resolved_ui is None:
                if route in ("/", "/index.html"):
                    self._send_bytes(_FALLBACK_INDEX.encode(), "text/html; charset=utf-8")
                else:
                    self._error(404, "not found")
                return
            relative = route.lstrip("/") or "index.html"
            candidate = (resolved_ui / relative).resolve()
            if resolved_ui != candidate and resolved_ui not in candidate.parents:
                self._error(403, "forbidden")
                return
            if not candidate.is_file():
                self._error(404, "not found")
                return
            content_type = mimetypes.guess_type(candidate.name)[0] or "application/octet-stream"
            self._send_bytes(candidate.read_bytes(), content_type)

        def _send_file(self, path: Path, content_type: str) -> None:
            if not path.is_file():
                self._error(404, f"{path.name} not found; run analyze first")
                return
            self._send_bytes(path.read_bytes(), content_type)

        def _send_bytes(self, payload: bytes, content_type: str) -> None:
            self.send_response(200)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def _error(self, status: int, message: str) -> None:
            payload = json.dumps({"error": message}).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

    return ThreadingHTTPServer(("127.0.0.1", port), Handler)
