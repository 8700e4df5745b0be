"""Read-only HTTP JSON API over precomputed result bundles.

Endpoints:
    GET /api/bundles
    GET /api/bundles/{id}/meta
    GET /api/bundles/{id}/spectrum?point=<idx>&m=<m>
    GET /api/bundles/{id}/autocorr?point=<idx>

Every response carries the bundle's config snapshot hash.  Bundles are
immutable; the server never writes and never re-estimates.  An optional
static directory (the explorer build) is served at the root.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .bundle import ResultBundle, list_bundles


class BundleStore:
    """Lazy, cached, read-only access to bundles under one directory."""

    def __init__(self, root):
        self.root = Path(root)
        self._cache: dict[str, ResultBundle] = {}
        self._lock = threading.Lock()

    def ids(self):
        return list_bundles(self.root)

    def get(self, bundle_id: str) -> ResultBundle | None:
        if bundle_id not in self.ids():
            return None
        with self._lock:
            if bundle_id not in self._cache:
                self._cache[bundle_id] = ResultBundle.read(self.root / bundle_id)
            return self._cache[bundle_id]


def _spectrum_payload(bundle: ResultBundle, point_idx: int, m: int) -> dict | None:
    key = (point_idx, m)
    if key not in bundle.spectra:
        return None
    s = bundle.spectra[key]
    payload = {
        "omega": s.grid.omegas.tolist(),
        "re": s.values.real.tolist(),
        "im": s.values.imag.tolist(),
        "point": [s.point.v1, s.point.v2],
        "m": m,
        "config_hash": bundle.config_hash,
    }
    if key in bundle.bands:
        b = bundle.bands[key]
        band = {"lower": b.lower.tolist(), "median": b.median.tolist(), "upper": b.upper.tolist()}
        if b.has_imaginary:
            band.update(
                im_lower=b.im_lower.tolist(),
                im_median=b.im_median.tolist(),
                im_upper=b.im_upper.tolist(),
            )
        payload["band"] = band
    if m in bundle.global_spectra:
        g = bundle.global_spectra[m]
        payload["global"] = {"omega": g.grid.omegas.tolist(), "re": g.values.real.tolist()}
        if m in bundle.global_bands:
            gb = bundle.global_bands[m]
            payload["global"]["band"] = {
                "lower": gb.lower.tolist(),
                "median": gb.median.tolist(),
                "upper": gb.upper.tolist(),
            }
    return payload


def _autocorr_payload(bundle: ResultBundle, point_idx: int) -> dict | None:
    if not 0 <= point_idx < len(bundle.autocorrs):
        return None
    a = bundle.autocorrs[point_idx]
    return {
        "h": list(range(1, a.max_lag + 1)),
        "rho": a.rho_at_v.tolist(),
        "rho_reflected": a.rho_at_v_reflected.tolist(),
        "nc": a.nc_at_v.tolist(),
        "nc_reflected": a.nc_at_v_reflected.tolist(),
        "point": [a.point.v1, a.point.v2],
        "config_hash": bundle.config_hash,
    }


def _meta_payload(bundle: ResultBundle) -> dict:
    return {
        "id": bundle.bundle_id,
        "config": bundle.config_snapshot,
        "config_hash": bundle.config_hash,
        "series_digest": bundle.series_digest,
        "points": [[p.v1, p.v2] for p in bundle.points],
        "b": [bundle.bandwidth.b1, bundle.bandwidth.b2],
        "m_list": list(bundle.m_list),
        "window": bundle.window_kind,
        "has_bands": bool(bundle.bands),
        "nc_summary": bundle.nc_summary,
    }


def make_handler(store: BundleStore, static_dir=None):
    static_root = Path(static_dir) if static_dir else None

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send_json(self, payload, status=200):
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _send_error_json(self, status, message):
            self._send_json({"error": message}, status=status)

        def do_GET(self):
            url = urlparse(self.path)
            parts = [p for p in url.path.split("/") if p]
            try:
                if parts[:2] == ["api", "bundles"]:
                    self._handle_api(parts[2:], parse_qs(url.query))
                elif static_root is not None:
                    self._serve_static(url.path)
                else:
                    self._send_error_json(404, "not found")
            except BrokenPipeError:
                pass

        def _handle_api(self, rest, query):
            store_ids = store.ids()
            if not rest:
                bundles = []
                for bid in store_ids:
                    b = store.get(bid)
                    bundles.append({"id": bid, "config_hash": b.config_hash})
                self._send_json({"bundles": bundles})
                return
            bundle = store.get(rest[0])
            if bundle is None:
                self._send_error_json(404, f"unknown bundle {rest[0]!r}")
                return
            tail = rest[1] if len(rest) > 1 else "meta"
            if tail == "meta":
                self._send_json(_meta_payload(bundle))
            elif tail == "spectrum":
                try:
                    point_idx = int(query.get("point", ["0"])[0])
                    m = int(query.get("m", [str(max(bundle.m_list))])[0])
                except ValueError:
                    self._send_error_json(400, "point and m must be integers")
                    return
                payload = _spectrum_payload(bundle, point_idx, m)
                if payload is None:
                    self._send_error_json(404, f"no spectrum for point={point_idx}, m={m}")
                else:
                    self._send_json(payload)
            elif tail == "autocorr":
                try:
                    point_idx = int(query.get("point", ["0"])[0])
                except ValueError:
                    self._send_error_json(400, "point must be an integer")
                    return
                payload = _autocorr_payload(bundle, point_idx)
                if payload is None:
                    self._send_error_json(404, f"no point index {point_idx}")
                else:
                    self._send_json(payload)
            else:
                self._send_error_json(404, f"unknown endpoint {tail!r}")

        def _serve_static(self, path):
            rel = path.lstrip("/") or "index.html"
            target = (static_root / rel).resolve()
            if not str(target).startswith(str(static_root.resolve())) or not target.is_file():
                self._send_error_json(404, "not found")
                return
            ctype = {
                ".html": "text/html",
                ".js": "application/javascript",
                ".css": "text/css",
                ".json": "application/json",
                ".svg": "image/svg+xml",
            }.get(target.suffix, "application/octet-stream")
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def serve(bundle_dir, host="127.0.0.1", port=8765, static_dir=None) -> ThreadingHTTPServer:
    """Build the server (not yet serving); caller runs serve_forever()."""
    store = BundleStore(bundle_dir)
    handler = make_handler(store, static_dir=static_dir)
    return ThreadingHTTPServer((host, port), handler)
