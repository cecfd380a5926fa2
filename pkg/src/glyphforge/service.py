"""HTTP JSON API over one knowledge base, backing the browser teach pad.

Endpoints (all bodies JSON):

    GET    /api/meta              -> {"dims": {"w", "h"}, "label_count", "version"}
    GET    /api/labels            -> [{"label", "teach_count"}, ...]
    POST   /api/teach             {"label", "rows"} -> {"label", "teach_count", "version"}
    POST   /api/classify          {"rows", "threshold"?} -> decision document
    GET    /api/weights/<label>   -> {"label", "teach_count", "rows"}
    DELETE /api/labels/<label>    -> {"version"}

``rows`` are strings of '#' (ink) and '.' (paper) matching the knowledge
base's grid. Quotients travel as exact numerator/denominator pairs plus a
server-rendered display string, so threshold comparisons stay exact in
exactly one place.

Mutations are serialized through a single lock and persisted atomically
before the response is sent: the served state never runs ahead of the
file, and killing the process never corrupts it. The version counter
increments on every successful mutation so the pad can poll for changes.
"""

from __future__ import annotations

import json
import threading
import traceback
import sys
from fractions import Fraction
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote, urlsplit

from . import store
from .errors import (
    DimsMismatchError,
    InvalidLabelError,
    UnknownLabelError,
)
from .grid import BinaryGrid
from .knowledge import KnowledgeBase
from .recognition import DEFAULT_THRESHOLD, classify


class RequestError(Exception):
    """Client error carrying the HTTP status to return."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class ApiSession:
    """One served knowledge base plus its monotonic mutation counter."""

    def __init__(self, kb_path, kb: KnowledgeBase):
        self.kb_path = Path(kb_path)
        self.kb = kb
        self.version = 0
        self._lock = threading.Lock()

    def meta(self) -> dict:
        with self._lock:
            return {
                "dims": {"w": self.kb.dims.width, "h": self.kb.dims.height},
                "label_count": len(self.kb),
                "version": self.version,
            }

    def labels(self) -> list:
        with self._lock:
            return [
                {"label": label, "teach_count": count}
                for label, count in self.kb.label_counts()
            ]

    def teach(self, label, rows) -> dict:
        grid = self._parse_rows(rows)
        if not isinstance(label, str):
            raise RequestError(422, "label must be a string")
        with self._lock:
            count = self.kb.teach(label, grid)
            try:
                store.save_kb(self.kb, self.kb_path)
            except BaseException:
                # Roll the in-memory teach back so memory never runs
                # ahead of the persisted file.
                self._undo_teach(label, grid)
                raise
            self.version += 1
            return {"label": label, "teach_count": count, "version": self.version}

    def _undo_teach(self, label, grid) -> None:
        entry = self.kb._entries[label]
        if entry.teach_count == 1:
            del self.kb._entries[label]
            return
        for i, c in enumerate(grid.cells):
            entry.weights[i] -= 1 if c else -1
        entry.teach_count -= 1

    def classify_rows(self, rows, threshold=None) -> dict:
        grid = self._parse_rows(rows)
        thr = DEFAULT_THRESHOLD if threshold is None else _parse_threshold(threshold)
        with self._lock:
            return classify(self.kb, grid, thr).to_dict()

    def weights(self, label: str) -> dict:
        with self._lock:
            matrix = self.kb.weights(label)
            return {
                "label": label,
                "teach_count": matrix.teach_count,
                "rows": matrix.rows(),
            }

    def forget(self, label: str) -> dict:
        with self._lock:
            removed = self.kb._entries.get(label)
            self.kb.forget(label)
            try:
                store.save_kb(self.kb, self.kb_path)
            except BaseException:
                self.kb._entries[label] = removed
                raise
            self.version += 1
            return {"version": self.version}

    def _parse_rows(self, rows) -> BinaryGrid:
        dims = self.kb.dims
        if (not isinstance(rows, list)
                or not all(isinstance(r, str) for r in rows)):
            raise RequestError(400, "rows must be a list of strings")
        if len(rows) != dims.height or any(len(r) != dims.width for r in rows):
            raise RequestError(
                400, f"rows must be {dims.height} strings of {dims.width} cells"
            )
        try:
            return BinaryGrid.from_text_rows(rows)
        except ValueError as exc:
            raise RequestError(400, str(exc))


def _parse_threshold(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise RequestError(400, "threshold must be a number or a numeric string")
    try:
        # Going through str() gives JSON numbers their decimal meaning.
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise RequestError(400, f"bad threshold {value!r}")


_PLACEHOLDER_PAGE = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>glyphforge</title></head>
<body><h1>glyphforge service</h1>
<p>The JSON API is mounted under <code>/api/</code>. Start the server with
<code>--static</code> pointing at the teach pad bundle to serve the UI here.</p>
</body></html>
"""

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "application/javascript; charset=utf-8",
    ".mjs": "application/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".map": "application/json",
}


class _Handler(BaseHTTPRequestHandler):
    server_version = "glyphforge"
    protocol_version = "HTTP/1.1"

    @property
    def session(self) -> ApiSession:
        return self.server.session

    def log_message(self, format, *args):
        pass

    # -- plumbing ----------------------------------------------------------

    def _send_json(self, obj, status: int = 200) -> None:
        body = json.dumps(obj, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, message: str) -> None:
        self._send_json({"error": message}, status=status)

    def _read_json(self) -> dict:
        length = self.headers.get("Content-Length")
        if length is None or not length.isdigit():
            raise RequestError(400, "missing request body")
        raw = self.rfile.read(int(length))
        try:
            body = json.loads(raw)
        except ValueError:
            raise RequestError(400, "request body is not valid JSON")
        if not isinstance(body, dict):
            raise RequestError(400, "request body must be a JSON object")
        return body

    def _dispatch(self, handler) -> None:
        try:
            handler()
        except RequestError as exc:
            self._send_error_json(exc.status, str(exc))
        except InvalidLabelError as exc:
            self._send_error_json(422, str(exc))
        except UnknownLabelError as exc:
            self._send_error_json(404, str(exc))
        except DimsMismatchError as exc:
            self._send_error_json(400, str(exc))
        except Exception:
            traceback.print_exc(file=sys.stderr)
            self._send_error_json(500, "internal error")

    # -- routes ------------------------------------------------------------

    def do_GET(self):
        path = urlsplit(self.path).path
        if path == "/api/meta":
            self._dispatch(lambda: self._send_json(self.session.meta()))
        elif path == "/api/labels":
            self._dispatch(lambda: self._send_json(self.session.labels()))
        elif path.startswith("/api/weights/"):
            label = unquote(path[len("/api/weights/"):])
            self._dispatch(lambda: self._send_json(self.session.weights(label)))
        elif path.startswith("/api/"):
            self._send_error_json(404, "no such endpoint")
        else:
            self._dispatch(lambda: self._serve_static(path))

    def do_POST(self):
        path = urlsplit(self.path).path
        if path == "/api/teach":
            def run():
                body = self._read_json()
                result = self.session.teach(body.get("label"), body.get("rows"))
                self._send_json(result)
            self._dispatch(run)
        elif path == "/api/classify":
            def run():
                body = self._read_json()
                result = self.session.classify_rows(
                    body.get("rows"), body.get("threshold")
                )
                self._send_json(result)
            self._dispatch(run)
        else:
            self._send_error_json(404, "no such endpoint")

    def do_DELETE(self):
        path = urlsplit(self.path).path
        if path.startswith("/api/labels/"):
            label = unquote(path[len("/api/labels/"):])
            self._dispatch(lambda: self._send_json(self.session.forget(label)))
        else:
            self._send_error_json(404, "no such endpoint")

    # -- static assets -----------------------------------------------------

    def _serve_static(self, path: str) -> None:
        root = self.server.static_dir
        if path == "/":
            path = "/index.html"
        if root is None:
            if path == "/index.html":
                self._send_bytes(_PLACEHOLDER_PAGE, "text/html; charset=utf-8")
            else:
                self._send_error_json(404, "not found")
            return
        root = Path(root).resolve()
        candidate = (root / path.lstrip("/")).resolve()
        if not candidate.is_relative_to(root) or not candidate.is_file():
            self._send_error_json(404, "not found")
            return
        content_type = _CONTENT_TYPES.get(candidate.suffix, "application/octet-stream")
        self._send_bytes(candidate.read_bytes(), content_type)

    def _send_bytes(self, body: bytes, content_type: str) -> None:
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def run_server(session: ApiSession, host: str = "127.0.0.1", port: int = 8642,
               static_dir=None) -> ThreadingHTTPServer:
    """Bind a threading HTTP server for the session. The caller drives
    serve_forever()/shutdown()."""
    server = ThreadingHTTPServer((host, port), _Handler)
    server.daemon_threads = True
    server.session = session
    server.static_dir = static_dir
    return server
