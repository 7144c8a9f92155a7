from math import comb, log

import numpy as np
import pytest
from scipy.integrate import quad

from fermi_ent.dm import max_entropy, reduced_density_matrix
from fermi_ent.ensemble import (
    EnsembleConfig,
    complex_normals,
    equal_cut_density,
    equal_cut_linear_moment,
    equal_cut_xlogx_moment,
    ks_statistic,
    mean_entropy_prediction,
    mix_seed,
    mp_density,
    numeric_cdf,
    predicted_moments,
    run_ensemble,
    sample_random_state,
    sample_trace_fixed_wishart,
    semicircle_cdf,
    semicircle_density,
    support_edges,
    trace_fixed_mp_density,
    _rng,
)


def test_mix_seed_distinct_streams():
    keys = {mix_seed(12345, r) for r in range(1000)}
    assert len(keys) == 1000
    assert mix_seed(1, 0) != mix_seed(2, 0)
    assert mix_seed(7, 3) == mix_seed(7, 3)


def test_complex_normals_moments():
    rng = _rng(99)
    z = complex_normals(rng, 200_000)
    assert abs(z.real.mean()) < 0.02
    assert abs(z.real.std() - 1.0) < 0.02
    assert abs(z.imag.std() - 1.0) < 0.02
    assert abs(np.mean(z.real * z.imag)) < 0.02


def test_sample_random_state_reproducible():
    a = sample_random_state(6, 3, seed=42)
    b = sample_random_state(6, 3, seed=42)
    assert a.terms == b.terms
    assert a.num_terms() == comb(6, 3)
    assert abs(sum(abs(amp) ** 2 for _, amp in a.terms) - 1.0) < 1e-12


def test_sample_random_state_uniform_mean():
    # mean |amplitude|^2 is 1/C(D,N) by exchange symmetry
    total = np.zeros(comb(6, 3))
    reps = 3000
    for r in range(reps):
        state = sample_random_state(6, 3, seed=mix_seed(5, r))
        total += np.abs([a for _, a in state.terms]) ** 2
    mean = total / reps
    assert np.all(np.abs(mean - 1 / 20) < 0.02 / 20 * 20)
    assert abs(mean.mean() - 1 / 20) < 0.0005


def test_trace_fixed_wishart():
    for r in range(30):
        w = sample_trace_fixed_wishart(4, 9, trace=6.0, seed=mix_seed(3, r))
        assert np.allclose(w, w.conj().T)
        assert abs(np.trace(w).real - 6.0) < 1e-12
        assert np.linalg.eigvalsh(w).min() > -1e-12
    scalar = sample_trace_fixed_wishart(1, 3, trace=2.5, seed=0)
    assert scalar.shape == (1, 1)
    assert scalar[0, 0].real == pytest.approx(2.5)


def test_mp_density_normalization_and_moments():
    for c in (1.0, 0.5, 1 / 6):
        lo, hi = support_edges(c)
        lo = max(lo, 1e-12)
        total, _ = quad(lambda y: mp_density(y, c), lo, hi, limit=200)
        assert total == pytest.approx(1.0, abs=1e-6)
        mean, _ = quad(lambda y: y * mp_density(y, c), lo, hi, limit=200)
        assert mean == pytest.approx(1 / c, abs=1e-5)


def test_mp_density_c1_support():
    assert support_edges(1.0) == (0.0, 4.0)
    y = 2.0
    assert mp_density(y, 1.0) == pytest.approx(np.sqrt(y * (4 - y)) / (2 * np.pi * y))


def test_trace_fixed_mp_moments():
    D, N, M = 20, 5, 2
    mom = predicted_moments(D, N, M)
    assert mom.c == pytest.approx(1 / 6)
    assert mom.mu == pytest.approx(10 / 190)
    lo = mom.xi_minus * mom.mu * mom.c
    hi = mom.xi_plus * mom.mu * mom.c
    total, _ = quad(lambda z: trace_fixed_mp_density(z, D, N, M), lo, hi, limit=300)
    assert total == pytest.approx(1.0, abs=1e-6)
    mean, _ = quad(lambda z: z * trace_fixed_mp_density(z, D, N, M), lo, hi, limit=300)
    assert mean == pytest.approx(mom.mu, abs=1e-6)
    var, _ = quad(
        lambda z: (z - mom.mu) ** 2 * trace_fixed_mp_density(z, D, N, M),
        lo,
        hi,
        limit=300,
    )
    assert np.sqrt(var) == pytest.approx(mom.sigma, abs=1e-6)


def test_semicircle_density_properties():
    mu, sigma = 0.08, 0.004
    lo, hi = mu - 2 * sigma, mu + 2 * sigma
    total, _ = quad(lambda z: semicircle_density(z, mu, sigma), lo, hi)
    assert total == pytest.approx(1.0, abs=1e-6)
    mean, _ = quad(lambda z: z * semicircle_density(z, mu, sigma), lo, hi)
    assert mean == pytest.approx(mu, abs=1e-9)
    var, _ = quad(lambda z: (z - mu) ** 2 * semicircle_density(z, mu, sigma), lo, hi)
    assert var == pytest.approx(sigma**2, abs=1e-9)
    assert semicircle_density(mu - 3 * sigma, mu, sigma) == 0.0


def test_predicted_moments_examples():
    mom = predicted_moments(50, 4, 1)
    assert mom.mu == pytest.approx(0.08)
    assert mom.sigma == pytest.approx(0.004, rel=0.05)
    assert predicted_moments(20, 4, 2).c == pytest.approx(1.0)
    assert predicted_moments(30, 4, 2).c == pytest.approx(1.0)  # c=1 for any D
    # above half cut, the effective cut keeps c <= 1
    assert predicted_moments(10, 4, 3).c == predicted_moments(10, 4, 1).c


def test_equal_cut_density():
    mu = 6 / 190
    total, _ = quad(lambda z: equal_cut_density(z, mu), 0, 4 * mu, limit=300)
    assert total == pytest.approx(1.0, abs=1e-6)
    mean, _ = quad(lambda z: z * equal_cut_density(z, mu), 0, 4 * mu, limit=300)
    assert mean == pytest.approx(mu, abs=1e-7)
    # square-root change of variables gives a centered semicircle
    s = 0.7 * np.sqrt(mu)
    z = s**2
    lhs = equal_cut_density(z, mu) * 2 * s  # density transported to s
    rhs = 2 / (2 * np.pi * mu) * np.sqrt(4 * mu - s**2)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    # matches the general law at c = 1
    assert equal_cut_density(z, 6 / comb(20, 2)) == pytest.approx(
        trace_fixed_mp_density(z, 20, 4, 2), rel=1e-12
    )


def test_entropy_constants():
    a1 = equal_cut_linear_moment()
    a2 = equal_cut_xlogx_moment()
    assert a1 == pytest.approx(1 / 16, abs=1e-7)
    assert a2 == pytest.approx(-0.055393, abs=1e-5)
    assert a2 == pytest.approx((0.5 - np.log(4)) / 16, abs=1e-7)


def test_mean_entropy_prediction():
    # equal cut: deficit is C(N, N/2)/2 for any D
    for D in (12, 20, 30):
        assert mean_entropy_prediction(D, 4, 2) == pytest.approx(
            max_entropy(D, 4, 2) - 3.0
        )
    # c -> 0: deficit vanishes
    assert max_entropy(50, 4, 1) - mean_entropy_prediction(50, 4, 1) == pytest.approx(
        4 * predicted_moments(50, 4, 1).c / 2
    )


def test_sigma_asymptotic_form():
    # for N=4, M=1 the width mu*sqrt(c) approaches N sqrt((N-1)!) D^(-N/2)
    for D in (20, 30, 40, 50):
        mom = predicted_moments(D, 4, 1)
        asym = 4 * np.sqrt(6.0) * D**-2.0
        assert abs(mom.sigma - asym) / mom.sigma < 0.10


def test_ks_statistic_uniform():
    samples = np.sort(np.linspace(0.005, 0.995, 100))
    assert ks_statistic(samples, samples) < 0.011


def test_numeric_cdf_matches_closed_form():
    mu, sigma = 0.05, 0.01
    zs = np.linspace(mu - 2 * sigma, mu + 2 * sigma, 50)
    num = numeric_cdf(
        lambda z: semicircle_density(z, mu, sigma), mu - 2 * sigma, mu + 2 * sigma, zs
    )
    assert np.max(np.abs(num - semicircle_cdf(zs, mu, sigma))) < 1e-6


def test_run_ensemble_state_kind_small():
    cfg = EnsembleConfig(D=8, N=4, M=1, realizations=40, seed=11)
    report = run_ensemble(cfg)
    assert report.eigenvalue_count == 40 * 8
    assert report.empirical_mean == pytest.approx(report.mu, rel=0.02)
    assert 0 < report.mean_entropy <= report.s_max + 1e-9
    again = run_ensemble(cfg)
    assert again.empirical_mean == report.empirical_mean
    assert again.ks_mp == report.ks_mp
    assert np.array_equal(again.empirical_density, report.empirical_density)


def test_run_ensemble_wl_kind():
    cfg = EnsembleConfig(D=6, N=3, M=1, realizations=10, seed=5, kind="wl")
    report = run_ensemble(cfg)
    assert report.eigenvalue_count == 10 * 6
    assert report.empirical_mean == pytest.approx(3 / 6, rel=1e-6)  # traces exact


def test_run_ensemble_cut_symmetry():
    # identical streams at M and N-M give identical nonzero spectra
    a = run_ensemble(EnsembleConfig(D=7, N=4, M=1, realizations=15, seed=3))
    b = run_ensemble(EnsembleConfig(D=7, N=4, M=3, realizations=15, seed=3))
    assert a.eigenvalue_count == b.eigenvalue_count
    assert a.empirical_mean == pytest.approx(b.empirical_mean, abs=1e-12)
    assert abs(a.mean_entropy - b.mean_entropy) < 1e-10


def test_run_ensemble_matches_direct_dm():
    # one realization pooled through the bulk path equals the sparse engine
    cfg = EnsembleConfig(D=6, N=3, M=1, realizations=1, seed=21)
    report = run_ensemble(cfg)
    state = sample_random_state(6, 3, seed=mix_seed(21, 0))
    direct = reduced_density_matrix(state, 1).spectrum()
    pooled = np.sort(direct)[::-1]
    hist_mean = report.empirical_mean
    assert hist_mean == pytest.approx(float(np.mean(pooled)), abs=1e-12)
    assert report.mean_entropy == pytest.approx(
        float(-(pooled[pooled > 0] * np.log(pooled[pooled > 0])).sum()), abs=1e-10
    )


def test_ensemble_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(D=6, N=3, M=3, realizations=5, seed=0)
    with pytest.raises(ValueError):
        EnsembleConfig(D=6, N=3, M=1, realizations=0, seed=0)
    with pytest.raises(ValueError):
        EnsembleConfig(D=6, N=3, M=1, realizations=5, seed=0, kind="bogus")
