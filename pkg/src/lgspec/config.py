"""Run configuration: JSON file schema, quantile-shorthand points, and the
bandwidth rule of thumb b = 1.75 n^(-1/6)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from scipy.special import ndtri

from .core import Bandwidth, DataError, LocalPoint
from .models import ApArchModel, CosineModel, LocalTrigModel
from .resampling import BandSpec

CONFIG_SCHEMA_VERSION = 1

MODEL_NAMES = ("gaussian-wn", "cosine", "local-trig", "aparch")


def auto_bandwidth(n: int) -> float:
    """Rule-of-thumb bandwidth for a series of length n."""
    return 1.75 * n ** (-1.0 / 6.0)


def resolve_point(spec) -> LocalPoint:
    """A point is a [v1, v2] pair or a quantile shorthand like "10%",
    which lands on the diagonal at the standard normal quantile."""
    if isinstance(spec, str):
        txt = spec.strip()
        if not txt.endswith("%"):
            raise DataError(f"point shorthand must end with %%, got {spec!r}")
        q = float(txt[:-1]) / 100.0
        if not 0.0 < q < 1.0:
            raise DataError(f"quantile must lie in (0, 1), got {spec!r}")
        c = float(ndtri(q))
        return LocalPoint(c, c)
    if len(spec) != 2:
        raise DataError(f"point must be a [v1, v2] pair, got {spec!r}")
    return LocalPoint(float(spec[0]), float(spec[1]))


def build_model(source: dict):
    """Instantiate a simulator model from its config block."""
    name = source.get("model")
    params = source.get("params", {})
    if name == "gaussian-wn":
        return None
    if name == "cosine":
        return CosineModel(**params)
    if name == "local-trig":
        return LocalTrigModel(
            **{k: tuple(v) if isinstance(v, list) else v for k, v in params.items()}
        )
    if name == "aparch":
        return ApArchModel(
            **{k: tuple(v) if isinstance(v, list) else v for k, v in params.items()}
        )
    raise DataError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")


@dataclass
class RunConfig:
    """One pipeline run: source, points, bandwidth, truncations, ensemble."""

    source: dict
    points: list = field(default_factory=lambda: ["10%", "50%", "90%"])
    b: object = "auto"
    m_list: list = field(default_factory=lambda: [10])
    window: str = "tukey-hanning"
    grid_points: int = 257
    band: dict = field(default_factory=dict)
    seed: int = 0
    n: int = 1974
    burn_in: int = 1000
    diag_lags: list = field(default_factory=lambda: [1])
    output_dir: str = "lgspec-out"

    def __post_init__(self):
        if not self.points:
            raise DataError("points must be nonempty")
        if not self.m_list:
            raise DataError("m_list must be nonempty")
        if "csv" not in self.source and "model" not in self.source:
            raise DataError("source needs either a 'csv' path or a 'model' name")
        if "model" in self.source:
            build_model(self.source)  # validate eagerly

    @staticmethod
    def from_file(path, overrides: dict | None = None) -> "RunConfig":
        with open(path) as fh:
            raw = json.load(fh)
        version = raw.pop("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise DataError(f"unsupported config schema_version {version}")
        if overrides:
            raw.update({k: v for k, v in overrides.items() if v is not None})
        known = set(RunConfig.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        return RunConfig(**raw)

    def resolved_points(self) -> list:
        return [resolve_point(p) for p in self.points]

    def resolved_bandwidth(self, n: int) -> Bandwidth:
        if self.b == "auto":
            bb = auto_bandwidth(n)
            return Bandwidth(bb, bb)
        if isinstance(self.b, (int, float)):
            return Bandwidth(float(self.b), float(self.b))
        return Bandwidth(float(self.b[0]), float(self.b[1]))

    def band_spec(self) -> BandSpec:
        merged = {"seed": self.seed, **self.band}
        return BandSpec(**merged)

    def snapshot(self) -> dict:
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "source": self.source,
            "points": self.points,
            "b": self.b,
            "m_list": list(self.m_list),
            "window": self.window,
            "grid_points": self.grid_points,
            "band": self.band,
            "seed": self.seed,
            "n": self.n,
            "burn_in": self.burn_in,
        }

    def snapshot_hash(self) -> str:
        canon = json.dumps(self.snapshot(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()
