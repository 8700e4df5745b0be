"""Self-describing result bundles: everything one estimation run produced,
written once under an id derived from the config and data, re-loadable and
re-verifiable.  The HTTP server and the explorer consume these bundles
read-only; nothing is ever recomputed from them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Bandwidth, DataError, LocalPoint, NormalizedSeries
from .lags import LocalAutocorrSet
from .resampling import BandSpec, ConfidenceBand, EnsembleBands
from .spectral import FrequencyGrid, SpectrumEstimate

BUNDLE_VERSION = 1


@dataclass
class ResultBundle:
    """Everything computed for one (data, points, b, m_list) run."""

    config_snapshot: dict
    config_hash: str
    series_digest: str
    points: list
    bandwidth: Bandwidth
    m_list: list
    grid: FrequencyGrid
    window_kind: str
    autocorrs: list            # LocalAutocorrSet per point (at max m)
    spectra: dict              # (point_idx, m) -> SpectrumEstimate
    global_spectra: dict       # m -> SpectrumEstimate
    bands: dict = field(default_factory=dict)         # (point_idx, m) -> ConfidenceBand
    global_bands: dict = field(default_factory=dict)  # m -> ConfidenceBand
    nc_summary: dict = field(default_factory=dict)
    version: int = BUNDLE_VERSION

    @property
    def bundle_id(self) -> str:
        return f"{self.config_hash[:12]}"

    def attach_bands(self, bands: EnsembleBands) -> None:
        for (ip, m), band in bands.local.items():
            self.bands[(ip, m)] = band
        for m, band in bands.global_.items():
            self.global_bands[m] = band
        self.nc_summary["band_nc_failures"] = {str(ip): c for ip, c in bands.nc_by_point.items()}

    # --- serialization --------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config_snapshot,
            "config_hash": self.config_hash,
            "series_digest": self.series_digest,
            "points": [[p.v1, p.v2] for p in self.points],
            "b": [self.bandwidth.b1, self.bandwidth.b2],
            "m_list": list(self.m_list),
            "omega": self.grid.omegas.tolist(),
            "window": self.window_kind,
            "autocorrs": [a.to_json_dict() for a in self.autocorrs],
            "spectra": [
                {"point_idx": ip, **s.to_json_dict()} for (ip, _), s in sorted(self.spectra.items())
            ],
            "global_spectra": [s.to_json_dict() for _, s in sorted(self.global_spectra.items())],
            "bands": [
                {"point_idx": ip, **b.to_json_dict()} for (ip, _), b in sorted(self.bands.items())
            ],
            "global_bands": [b.to_json_dict() for _, b in sorted(self.global_bands.items())],
            "nc_summary": self.nc_summary,
        }

    def write(self, out_dir) -> Path:
        """Write bundle.json plus CSV exports; returns the bundle directory."""
        root = Path(out_dir) / self.bundle_id
        root.mkdir(parents=True, exist_ok=True)
        with open(root / "bundle.json", "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)
        for ip, acf in enumerate(self.autocorrs):
            acf.to_csv(root / f"autocorr_point{ip}.csv")
        for (ip, m), s in self.spectra.items():
            s.to_csv(root / f"spectrum_point{ip}_m{m}.csv")
        for m, s in self.global_spectra.items():
            s.to_csv(root / f"spectrum_global_m{m}.csv")
        for (ip, m), b in self.bands.items():
            b.to_csv(root / f"band_point{ip}_m{m}.csv")
        for m, b in self.global_bands.items():
            b.to_csv(root / f"band_global_m{m}.csv")
        return root

    @staticmethod
    def read(bundle_dir) -> "ResultBundle":
        path = Path(bundle_dir) / "bundle.json"
        if not path.exists():
            raise DataError(f"no bundle.json under {bundle_dir}")
        with open(path) as fh:
            raw = json.load(fh)
        if raw.get("version") != BUNDLE_VERSION:
            raise DataError(f"unsupported bundle version {raw.get('version')}")
        grid = FrequencyGrid(np.array(raw["omega"]))
        points = [LocalPoint(p[0], p[1]) for p in raw["points"]]
        b = Bandwidth(raw["b"][0], raw["b"][1])
        autocorrs = []
        for a in raw["autocorrs"]:
            autocorrs.append(
                LocalAutocorrSet(
                    point=LocalPoint(a["point"][0], a["point"][1]),
                    bandwidth=Bandwidth(a["b"][0], a["b"][1]),
                    max_lag=a["max_lag"],
                    rho_at_v=np.array(a["rho"]),
                    rho_at_v_reflected=np.array(a["rho_reflected"]),
                    nc_at_v=np.array(a["nc"]),
                    nc_at_v_reflected=np.array(a["nc_reflected"]),
                )
            )
        spectra = {}
        for s in raw["spectra"]:
            ip = s["point_idx"]
            spectra[(ip, s["m"])] = SpectrumEstimate(
                grid=grid,
                values=np.array(s["re"]) + 1j * np.array(s["im"]),
                point=LocalPoint(s["point"][0], s["point"][1]),
                m=s["m"],
                bandwidth=Bandwidth(s["b"][0], s["b"][1]),
                window_kind=s["window"],
                label=s["label"],
            )
        global_spectra = {}
        for s in raw["global_spectra"]:
            global_spectra[s["m"]] = SpectrumEstimate(
                grid=grid,
                values=np.array(s["re"]) + 1j * np.array(s["im"]),
                point=None,
                m=s["m"],
                bandwidth=None,
                window_kind=s["window"],
                label=s["label"],
            )
        bands = {}
        for bd in raw.get("bands", []):
            ip = bd["point_idx"]
            bands[(ip, bd["m"])] = _band_from_dict(bd, grid, points[ip])
        global_bands = {}
        for bd in raw.get("global_bands", []):
            global_bands[bd["m"]] = _band_from_dict(bd, grid, None)
        return ResultBundle(
            config_snapshot=raw["config"],
            config_hash=raw["config_hash"],
            series_digest=raw["series_digest"],
            points=points,
            bandwidth=b,
            m_list=list(raw["m_list"]),
            grid=grid,
            window_kind=raw["window"],
            autocorrs=autocorrs,
            spectra=spectra,
            global_spectra=global_spectra,
            bands=bands,
            global_bands=global_bands,
            nc_summary=raw.get("nc_summary", {}),
            version=raw["version"],
        )

    def verify(self, normalized: NormalizedSeries | None = None) -> bool:
        """Check internal consistency; with the series, also its digest."""
        for ip in range(len(self.points)):
            for m in self.m_list:
                if (ip, m) not in self.spectra:
                    raise DataError(f"bundle missing spectrum for point {ip}, m={m}")
        for m in self.m_list:
            if m not in self.global_spectra:
                raise DataError(f"bundle missing global spectrum for m={m}")
        if normalized is not None and normalized.source_hash != self.series_digest:
            raise DataError("series digest mismatch")
        return True


def _band_from_dict(bd: dict, grid: FrequencyGrid, point) -> ConfidenceBand:
    kwargs = {}
    if "im_lower" in bd:
        kwargs = {
            "im_lower": np.array(bd["im_lower"]),
            "im_median": np.array(bd["im_median"]),
            "im_upper": np.array(bd["im_upper"]),
        }
    return ConfidenceBand(
        grid=grid,
        lower=np.array(bd["lower"]),
        median=np.array(bd["median"]),
        upper=np.array(bd["upper"]),
        point=point,
        m=bd["m"],
        source=bd.get("source", ""),
        nc_failures=bd.get("nc_failures", 0),
        **kwargs,
    )


def list_bundles(out_dir) -> list:
    """Bundle ids under a directory (any subdir holding a bundle.json)."""
    root = Path(out_dir)
    if not root.exists():
        return []
    return sorted(p.name for p in root.iterdir() if (p / "bundle.json").exists())
