import numpy as np
import pytest

from lgspec import (
    Bandwidth,
    DataError,
    FrequencyGrid,
    LagWindow,
    LocalPoint,
    Series,
    SpectrumEstimate,
    conjugate_reflect,
    global_spectrum,
    lag_window_value,
    local_spectrum,
    normalize,
    sample_autocorr,
)
from lgspec.lags import LocalAutocorrSet
from lgspec.spectral import synthesize

B = Bandwidth(0.5, 0.5)


def make_acf(point, rho, rho_reflected=None, b=B):
    rho = np.asarray(rho, dtype=float)
    if rho_reflected is None:
        rho_reflected = rho
    rho_reflected = np.asarray(rho_reflected, dtype=float)
    m = rho.size
    ok = np.ones(m, dtype=bool)
    return LocalAutocorrSet(
        point=point, bandwidth=b, max_lag=m,
        rho_at_v=rho, rho_at_v_reflected=rho_reflected,
        nc_at_v=ok, nc_at_v_reflected=ok,
    )


# --- lag window ----------------------------------------------------------------

def test_tukey_hanning_values():
    w = LagWindow("tukey-hanning", 10)
    assert lag_window_value(w, 0) == 1.0
    assert lag_window_value(w, 10) == pytest.approx(0.0, abs=1e-15)
    assert lag_window_value(w, 5) == pytest.approx(0.5, abs=1e-15)
    assert lag_window_value(w, 11) == 0.0
    assert lag_window_value(w, -5) == lag_window_value(w, 5)


def test_uniform_window():
    w = LagWindow("uniform", 3)
    assert [lag_window_value(w, h) for h in range(5)] == [1.0, 1.0, 1.0, 1.0, 0.0]


def test_window_m_zero_is_identity_weight():
    for kind in ("tukey-hanning", "uniform"):
        w = LagWindow(kind, 0)
        assert lag_window_value(w, 0) == 1.0
        assert lag_window_value(w, 1) == 0.0


def test_window_validation():
    with pytest.raises(DataError):
        LagWindow("hamming", 5)
    with pytest.raises(DataError):
        LagWindow("uniform", -1)


# --- frequency grid --------------------------------------------------------------

def test_default_grid():
    g = FrequencyGrid.default()
    assert len(g) == 257
    assert g.omegas[0] == 0.0 and g.omegas[-1] == 0.5
    assert g.omegas[1] == pytest.approx(1 / 512)


def test_grid_validation():
    with pytest.raises(DataError):
        FrequencyGrid(np.array([0.0, 0.6]))
    with pytest.raises(DataError):
        FrequencyGrid(np.array([0.3, 0.2]))
    with pytest.raises(DataError):
        FrequencyGrid(np.array([-0.1, 0.2]))


# --- local spectrum ----------------------------------------------------------------

def test_flat_spectrum_for_zero_rho():
    acf = make_acf(LocalPoint(0, 0), np.zeros(10))
    s = local_spectrum(acf, LagWindow("tukey-hanning", 10), FrequencyGrid.default())
    assert np.allclose(s.values.real, 1.0)
    assert np.all(s.values.imag == 0.0)


def test_single_lag_synthesis_diagonal():
    r = 0.4
    grid = FrequencyGrid.default()
    acf = make_acf(LocalPoint(0, 0), np.array([r, 0.0, 0.0]))
    w = LagWindow("tukey-hanning", 3)
    s = local_spectrum(acf, w, grid)
    lam1 = lag_window_value(w, 1)
    expected = 1.0 + 2.0 * lam1 * r * np.cos(2 * np.pi * grid.omegas)
    assert np.max(np.abs(s.values.real - expected)) < 1e-14


def test_single_lag_synthesis_off_diagonal():
    a, c = 0.3, 0.1
    grid = FrequencyGrid.default()
    acf = make_acf(LocalPoint(1.0, -1.0), np.array([a]), np.array([c]))
    # uniform window keeps lambda(1|1) = 1 so the single lag contributes
    s = local_spectrum(acf, LagWindow("uniform", 1), grid)
    expected_re = 1.0 + (a + c) * np.cos(2 * np.pi * grid.omegas)
    expected_im = (c - a) * np.sin(2 * np.pi * grid.omegas)
    assert np.max(np.abs(s.values.real - expected_re)) < 1e-14
    assert np.max(np.abs(s.values.imag - expected_im)) < 1e-14


def test_diagonal_spectrum_exactly_real():
    rng = np.random.default_rng(50)
    acf = make_acf(LocalPoint(0.5, 0.5), rng.uniform(-0.5, 0.5, size=6))
    s = local_spectrum(acf, LagWindow("tukey-hanning", 6), FrequencyGrid.default())
    assert np.all(s.values.imag == 0.0)
    assert s.is_real


def test_m_exceeding_lags_is_error():
    acf = make_acf(LocalPoint(0, 0), np.zeros(4))
    with pytest.raises(DataError):
        local_spectrum(acf, LagWindow("tukey-hanning", 5), FrequencyGrid.default())


def test_unit_mass_integral():
    # trig polynomials integrate exactly under a uniform rule with enough
    # points; the spectrum over (-1/2, 1/2] must integrate to 1
    rng = np.random.default_rng(51)
    m = 12
    rho = rng.uniform(-0.6, 0.6, size=m)
    rho_r = rng.uniform(-0.6, 0.6, size=m)
    n_quad = 4 * m + 1
    omegas = -0.5 + np.arange(n_quad) / n_quad  # midpoint-style uniform rule
    lam = np.array([lag_window_value(LagWindow("tukey-hanning", m), h) for h in range(1, m + 1)])
    h = np.arange(1, m + 1)
    vals = (
        1.0
        + np.cos(2 * np.pi * np.outer(omegas, h)) @ (lam * (rho + rho_r))
        + 1j * np.sin(2 * np.pi * np.outer(omegas, h)) @ (lam * (rho_r - rho))
    )
    integral = np.mean(vals)  # uniform weights over one period
    assert abs(integral - 1.0) < 1e-10


def test_conjugacy_of_reflected_synthesis():
    rng = np.random.default_rng(52)
    m = 8
    rho = rng.uniform(-0.5, 0.5, size=m)
    rho_r = rng.uniform(-0.5, 0.5, size=m)
    grid = FrequencyGrid.default()
    w = LagWindow("tukey-hanning", m)
    at_v = synthesize(rho, rho_r, w, grid, diagonal=False)
    at_reflected = synthesize(rho_r, rho, w, grid, diagonal=False)
    assert np.max(np.abs(at_v - np.conj(at_reflected))) < 1e-12


def test_conjugate_reflect_roundtrip():
    rng = np.random.default_rng(53)
    acf = make_acf(LocalPoint(1.0, 0.0), rng.uniform(-0.4, 0.4, 5), rng.uniform(-0.4, 0.4, 5))
    s = local_spectrum(acf, LagWindow("tukey-hanning", 5), FrequencyGrid.default())
    r = conjugate_reflect(s)
    assert r.point == LocalPoint(0.0, 1.0)
    assert np.array_equal(r.values, np.conj(s.values))
    back = conjugate_reflect(conjugate_reflect(s))
    assert np.max(np.abs(back.values - s.values)) < 1e-15
    assert back.point == s.point


def test_conjugate_reflect_diagonal_fixed_point():
    acf = make_acf(LocalPoint(0.2, 0.2), np.array([0.3, -0.1]))
    s = local_spectrum(acf, LagWindow("tukey-hanning", 2), FrequencyGrid.default())
    r = conjugate_reflect(s)
    assert np.array_equal(r.values, s.values)
    assert r.point == s.point


# --- global spectrum ---------------------------------------------------------------

def test_sample_autocorr_biased_divisor():
    z = normalize(Series(np.array([1.0, 3.0, 2.0, 5.0, 4.0, 6.0])))
    r = sample_autocorr(z, 2)
    x = z.values - z.values.mean()
    expected1 = np.sum(x[1:] * x[:-1]) / 6 / (np.sum(x * x) / 6)
    assert r[0] == pytest.approx(expected1, rel=1e-12)


def test_global_spectrum_flat_for_zero_autocorr():
    # constructed series with exactly zero lag-1 sample autocorrelation is
    # hard; instead check omega = 0 identity
    rng = np.random.default_rng(54)
    z = normalize(Series(rng.normal(size=300)))
    w = LagWindow("tukey-hanning", 5)
    grid = FrequencyGrid.default()
    s = global_spectrum(z, w, grid)
    r = sample_autocorr(z, 5)
    lam = np.array([lag_window_value(w, h) for h in range(1, 6)])
    assert s.values.real[0] == pytest.approx(1.0 + 2.0 * np.sum(lam * r), rel=1e-12)
    assert np.all(s.values.imag == 0.0)


def test_global_spectrum_m_zero_constant():
    rng = np.random.default_rng(55)
    z = normalize(Series(rng.normal(size=100)))
    s = global_spectrum(z, LagWindow("uniform", 0), FrequencyGrid.default())
    assert np.all(s.values.real == 1.0)


def test_global_spectrum_m_too_large():
    rng = np.random.default_rng(56)
    z = normalize(Series(rng.normal(size=20)))
    with pytest.raises(DataError):
        global_spectrum(z, LagWindow("tukey-hanning", 19), FrequencyGrid.default())


# --- estimate container --------------------------------------------------------------

def test_spectrum_estimate_rejects_nonreal_diagonal():
    grid = FrequencyGrid(np.array([0.0, 0.25, 0.5]))
    with pytest.raises(DataError):
        SpectrumEstimate(
            grid=grid,
            values=np.array([1.0, 1.0 + 0.1j, 1.0]),
            point=LocalPoint(0, 0),
            m=1,
            bandwidth=B,
            window_kind="uniform",
        )


def test_spectrum_csv_export(tmp_path):
    acf = make_acf(LocalPoint(0.5, 0.5), np.array([0.2]))
    s = local_spectrum(acf, LagWindow("uniform", 1), FrequencyGrid(np.array([0.0, 0.25])))
    path = tmp_path / "s.csv"
    s.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "omega,re,im,point_v1,point_v2,m,b1,b2,window"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert float(first[1]) == pytest.approx(1.4)
