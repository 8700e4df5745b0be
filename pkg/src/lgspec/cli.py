"""Command-line pipeline driver.

    lgspec simulate|diagnose|estimate|band|serve --config <file> [overrides]

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
non-convergence when --fail-on-nc was requested.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bundle import ResultBundle
from .config import RunConfig, build_model
from .core import DataError, Series, load_csv, normalize, strip_and_square_counts
from .lags import estimate_autocorrs
from .models import simulate_aparch, simulate_cosine, simulate_gaussian_wn, simulate_local_trig
from .resampling import BandSpec, BootstrapSource, PipelineParams, SimulationSource, ensemble_band
from .spectral import FrequencyGrid, LagWindow, global_spectrum, local_spectrum
from . import server as server_mod

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _simulator(config: RunConfig):
    """(draw(n, rng), model name) for the configured simulation source."""
    name = config.source["model"]
    model = build_model(config.source)
    if name == "gaussian-wn":
        return (lambda n, rng: simulate_gaussian_wn(n, rng)), name
    if name == "cosine":
        return (lambda n, rng: simulate_cosine(model, n, rng)), name
    if name == "local-trig":
        return (lambda n, rng: simulate_local_trig(model, n, rng)), name
    if name == "aparch":
        return (lambda n, rng: simulate_aparch(model, n, rng, burn_in=config.burn_in)), name
    raise DataError(f"unknown model {name!r}")


def _load_series(config: RunConfig) -> Series:
    if "csv" in config.source:
        return load_csv(config.source["csv"], config.source.get("column", 0))
    draw, _ = _simulator(config)
    return draw(config.n, np.random.default_rng(config.seed))


def cmd_simulate(config: RunConfig) -> int:
    draw, name = _simulator(config)
    series = draw(config.n, np.random.default_rng(config.seed))
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"sim_{name}_seed{config.seed}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y"])
        for y in series.values:
            writer.writerow([format(y, ".17g")])
    print(f"wrote {series.n} observations to {path}")
    return EXIT_OK


def cmd_diagnose(config: RunConfig) -> int:
    series = _load_series(config)
    z = normalize(series)
    b = config.resolved_bandwidth(series.n)
    points = config.resolved_points()
    rows = []
    print(f"{'point':>16} {'h':>5} {'strip':>7} {'square':>7}")
    for v in points:
        for h in config.diag_lags:
            strip, square = strip_and_square_counts(z, v, b, h)
            print(f"({v.v1:6.3f},{v.v2:6.3f}) {h:>5} {strip:>7} {square:>7}")
            rows.append([v.v1, v.v2, h, strip, square])
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "diagnostics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point_v1", "point_v2", "h", "strip_count", "square_count"])
        writer.writerows(rows)
    return EXIT_OK


def run_estimate(config: RunConfig) -> ResultBundle:
    """The full pipeline: fits once at max(m_list), synthesizes every m."""
    series = _load_series(config)
    z = normalize(series)
    b = config.resolved_bandwidth(series.n)
    points = config.resolved_points()
    m_list = sorted(set(int(m) for m in config.m_list))
    max_m = m_list[-1]
    if max_m > series.n - 2:
        raise DataError(f"max truncation {max_m} too large for n={series.n}")
    grid = FrequencyGrid.default(config.grid_points)

    autocorrs = []
    spectra = {}
    nc_summary = {"estimate_nc_failures": {}}
    for ip, v in enumerate(points):
        acf = estimate_autocorrs(z, v, b, max_m)
        autocorrs.append(acf)
        fails = int(np.sum(~acf.nc_at_v) + np.sum(~acf.nc_at_v_reflected))
        nc_summary["estimate_nc_failures"][str(ip)] = fails
        for m in m_list:
            spectra[(ip, m)] = local_spectrum(acf, LagWindow(config.window, m), grid)
    global_spectra = {
        m: global_spectrum(z, LagWindow(config.window, m), grid) for m in m_list
    }

    bundle = ResultBundle(
        config_snapshot=config.snapshot(),
        config_hash=config.snapshot_hash(),
        series_digest=z.source_hash,
        points=points,
        bandwidth=b,
        m_list=m_list,
        grid=grid,
        window_kind=config.window,
        autocorrs=autocorrs,
        spectra=spectra,
        global_spectra=global_spectra,
        nc_summary=nc_summary,
    )
    bundle.verify()
    return bundle


def _nc_exit(config: RunConfig, bundle: ResultBundle, fail_on_nc: bool) -> int:
    total = sum(bundle.nc_summary.get("estimate_nc_failures", {}).values())
    total += sum(int(c) for c in bundle.nc_summary.get("band_nc_failures", {}).values())
    if total:
        print(f"warning: {total} non-converged fits (NC = FAIL)", file=sys.stderr)
        if fail_on_nc:
            return EXIT_NUMERICAL
    return EXIT_OK


def cmd_estimate(config: RunConfig, fail_on_nc: bool = False) -> int:
    bundle = run_estimate(config)
    root = bundle.write(config.output_dir)
    z_path = root / "normalized.csv"
    normalize(_load_series(config)).to_csv(z_path)
    print(f"bundle {bundle.bundle_id} written to {root}")
    return _nc_exit(config, bundle, fail_on_nc)


def cmd_band(config: RunConfig, fail_on_nc: bool = False) -> int:
    bundle_dir = Path(config.output_dir) / config.snapshot_hash()[:12]
    if (bundle_dir / "bundle.json").exists():
        bundle = ResultBundle.read(bundle_dir)
    else:
        bundle = run_estimate(config)

    if "csv" in config.source:
        series = _load_series(config)
        source = BootstrapSource(series, config.band_spec().block_length)
    else:
        draw, name = _simulator(config)
        source = SimulationSource(draw, config.n, name=f"simulation:{name}")

    params = PipelineParams(
        points=tuple(bundle.points),
        m_list=tuple(bundle.m_list),
        b=bundle.bandwidth,
        window_kind=bundle.window_kind,
        grid=bundle.grid,
    )
    bands = ensemble_band(source, params, config.band_spec())
    bundle.attach_bands(bands)
    root = bundle.write(config.output_dir)
    print(f"bands appended to bundle {bundle.bundle_id} at {root}")
    return _nc_exit(config, bundle, fail_on_nc)


def cmd_serve(config: RunConfig, address: str, static_dir=None) -> int:
    host, _, port = address.partition(":")
    httpd = server_mod.serve(
        config.output_dir, host=host or "127.0.0.1", port=int(port or 8765),
        static_dir=static_dir,
    )
    print(f"serving bundles from {config.output_dir} at http://{httpd.server_address[0]}:{httpd.server_address[1]}")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="lgspec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "diagnose", "estimate", "band", "serve"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--output-dir", default=None, help="override output directory")
        p.add_argument("--n", type=int, default=None, help="override series length")
        if name in ("estimate", "band"):
            p.add_argument("--fail-on-nc", action="store_true",
                           help="exit 3 when any fit failed to converge")
        if name == "serve":
            p.add_argument("--address", default="127.0.0.1:8765")
            p.add_argument("--static", default=None, help="serve this directory at /")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {"seed": args.seed, "output_dir": args.output_dir, "n": args.n}
    try:
        config = RunConfig.from_file(args.config, overrides)
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "diagnose":
            return cmd_diagnose(config)
        if args.command == "estimate":
            return cmd_estimate(config, fail_on_nc=args.fail_on_nc)
        if args.command == "band":
            return cmd_band(config, fail_on_nc=args.fail_on_nc)
        if args.command == "serve":
            return cmd_serve(config, args.address, static_dir=args.static)
    except DataError as exc:
        print(f"lgspec: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"lgspec: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
