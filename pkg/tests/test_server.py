import json
import threading
import urllib.request

import numpy as np
import pytest

from lgspec.cli import run_estimate
from lgspec.config import RunConfig
from lgspec.server import serve


@pytest.fixture(scope="module")
def served_bundle(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("srv")
    cfg_path = tmp / "config.json"
    cfg_path.write_text(json.dumps({
        "source": {"model": "gaussian-wn"},
        "points": ["10%", "50%", "90%"],
        "b": [0.5, 0.5],
        "m_list": [2, 4],
        "n": 180,
        "seed": 3,
        "output_dir": str(tmp / "out"),
    }))
    config = RunConfig.from_file(cfg_path)
    bundle = run_estimate(config)
    bundle.write(config.output_dir)
    httpd = serve(config.output_dir, host="127.0.0.1", port=0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{httpd.server_address[1]}"
    yield base, bundle
    httpd.shutdown()


def fetch(url):
    with urllib.request.urlopen(url) as resp:
        return resp.status, json.loads(resp.read())


def fetch_error(url):
    try:
        with urllib.request.urlopen(url) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def test_list_bundles(served_bundle):
    base, bundle = served_bundle
    status, payload = fetch(f"{base}/api/bundles")
    assert status == 200
    ids = [b["id"] for b in payload["bundles"]]
    assert bundle.bundle_id in ids
    entry = next(b for b in payload["bundles"] if b["id"] == bundle.bundle_id)
    assert entry["config_hash"] == bundle.config_hash


def test_meta_endpoint(served_bundle):
    base, bundle = served_bundle
    status, meta = fetch(f"{base}/api/bundles/{bundle.bundle_id}/meta")
    assert status == 200
    assert meta["config_hash"] == bundle.config_hash
    assert meta["m_list"] == [2, 4]
    assert len(meta["points"]) == 3
    assert meta["has_bands"] is False


def test_spectrum_endpoint_matches_bundle(served_bundle):
    base, bundle = served_bundle
    status, payload = fetch(f"{base}/api/bundles/{bundle.bundle_id}/spectrum?point=1&m=4")
    assert status == 200
    expected = bundle.spectra[(1, 4)]
    assert payload["config_hash"] == bundle.config_hash
    assert np.allclose(payload["re"], expected.values.real, atol=0, rtol=0)
    assert np.allclose(payload["omega"], expected.grid.omegas, atol=0, rtol=0)
    assert "global" in payload
    assert np.allclose(
        payload["global"]["re"], bundle.global_spectra[4].values.real, atol=0, rtol=0
    )


def test_autocorr_endpoint(served_bundle):
    base, bundle = served_bundle
    status, payload = fetch(f"{base}/api/bundles/{bundle.bundle_id}/autocorr?point=0")
    assert status == 200
    acf = bundle.autocorrs[0]
    assert payload["h"] == list(range(1, acf.max_lag + 1))
    assert np.allclose(payload["rho"], acf.rho_at_v, atol=0, rtol=0)
    assert payload["config_hash"] == bundle.config_hash
    assert all(isinstance(flag, bool) for flag in payload["nc"])


def test_unknown_bundle_404(served_bundle):
    base, _ = served_bundle
    status, payload = fetch_error(f"{base}/api/bundles/doesnotexist/meta")
    assert status == 404
    assert "error" in payload


def test_unknown_spectrum_params_404(served_bundle):
    base, bundle = served_bundle
    status, _ = fetch_error(f"{base}/api/bundles/{bundle.bundle_id}/spectrum?point=0&m=99")
    assert status == 404
    status, _ = fetch_error(f"{base}/api/bundles/{bundle.bundle_id}/spectrum?point=9&m=4")
    assert status == 404


def test_bad_query_types_400(served_bundle):
    base, bundle = served_bundle
    status, _ = fetch_error(f"{base}/api/bundles/{bundle.bundle_id}/spectrum?point=x&m=4")
    assert status == 400
