"""Random-state and trace-fixed Wishart sampling with their limiting spectra.

Samples M-body density matrices of Gaussian-random N-fermion states (or
trace-fixed Wishart matrices of matching shape), pools eigenvalues and
entropies over realizations, and compares against the analytic limit curves:
rescaled Marchenko-Pastur for general shape ratio, its semicircle limit for
small ratio, and the square-case law for ratio one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb, pi

import numpy as np
from scipy.integrate import quad

from .dm import dense_amplitude_matrix, entropy_from_eigenvalues, max_entropy
from .fock import FermionState, subset_from_orbitals

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def mix_seed(master: int, index: int) -> int:
    """SplitMix64 finalizer on the index-advanced state: one independent
    64-bit stream key per (master seed, realization)."""
    z = (master + (index + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _rng(seed: int) -> np.random.Generator:
    # Philox: counter-based, documented constants, keyed per stream
    return np.random.Generator(np.random.Philox(key=seed & _MASK))


def complex_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Entries with independent N(0,1) real and imaginary parts (Box-Muller)."""
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.cos(2.0 * pi * u2) + 1j * r * np.sin(2.0 * pi * u2)


def _amplitude_vector(D: int, N: int, rng: np.random.Generator) -> np.ndarray:
    amps = complex_normals(rng, comb(D, N))
    return amps / np.linalg.norm(amps)


def sample_random_state(D: int, N: int, seed: int) -> FermionState:
    """Gaussian-random normalized state over the full determinant basis."""
    if not 1 <= N <= D <= 64:
        raise ValueError(f"need 1 <= N <= D <= 64, got D={D}, N={N}")
    amps = _amplitude_vector(D, N, _rng(seed))
    sds = (subset_from_orbitals(c) for c in combinations(range(1, D + 1), N))
    return FermionState(D, N, tuple(zip(sds, map(complex, amps))))


def sample_trace_fixed_wishart(n: int, m: int, trace: float, seed: int) -> np.ndarray:
    """H H^dagger for Gaussian H, rescaled to the exact target trace."""
    if n > m:
        raise ValueError(f"need n <= m, got n={n}, m={m}")
    h = complex_normals(_rng(seed), (n, m))
    w = h @ h.conj().T
    w = 0.5 * (w + w.conj().T)
    w *= trace / np.trace(w).real
    return w


# --- analytic densities -------------------------------------------------------


def support_edges(c: float) -> tuple[float, float]:
    return (1.0 - c**-0.5) ** 2, (1.0 + c**-0.5) ** 2


def mp_density(y, c: float):
    """Marchenko-Pastur scaling function at shape ratio c in (0, 1]."""
    if not 0 < c <= 1:
        raise ValueError(f"shape ratio must be in (0, 1], got {c}")
    lo, hi = support_edges(c)
    y = np.asarray(y, dtype=float)
    inside = (y > lo) & (y < hi)
    out = np.zeros_like(y)
    yy = y[inside]
    out[inside] = np.sqrt((yy - lo) * (hi - yy)) / (2.0 * pi * yy)
    return out if out.ndim else float(out)


@dataclass
class SpectralMoments:
    """Parameters of the limiting eigenvalue law for an M-cut at (D, N)."""

    mu: float
    sigma: float
    c: float
    xi_minus: float
    xi_plus: float


def predicted_moments(D: int, N: int, M: int) -> SpectralMoments:
    """Limit mean / width of the cut spectrum; the smaller side of the cut
    sets the effective size, so the shape ratio never exceeds 1."""
    if not 1 <= M <= N - 1:
        raise ValueError(f"need 1 <= M <= N-1, got M={M}")
    me = min(M, N - M)
    n = comb(D, me)
    m = comb(D, N - me)
    c = n / m
    mu = comb(N, me) / n
    lo, hi = support_edges(c)
    return SpectralMoments(mu=mu, sigma=mu * c**0.5, c=c, xi_minus=lo, xi_plus=hi)


def trace_fixed_mp_density(z, D: int, N: int, M: int):
    """Limiting eigenvalue density of the trace-fixed cut spectrum: the
    Marchenko-Pastur law rescaled to mean C(N,M)/C(D,M)."""
    mom = predicted_moments(D, N, M)
    z = np.asarray(z, dtype=float)
    scale = mom.mu * mom.c
    lo, hi = mom.xi_minus * scale, mom.xi_plus * scale
    inside = (z > lo) & (z < hi)
    out = np.zeros_like(z)
    zz = z[inside]
    out[inside] = np.sqrt((zz / scale - mom.xi_minus) * (mom.xi_plus - zz / scale)) / (
        2.0 * pi * zz
    )
    return out if out.ndim else float(out)


def semicircle_density(z, mu: float, sigma: float):
    """Semicircle of mean mu, standard deviation sigma (radius 2 sigma)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    z = np.asarray(z, dtype=float)
    arg = 4.0 * sigma**2 - (z - mu) ** 2
    out = np.where(arg > 0, np.sqrt(np.maximum(arg, 0.0)), 0.0) / (
        2.0 * pi * sigma**2
    )
    return out if out.ndim else float(out)


def equal_cut_density(z, mu: float):
    """Square-case (shape ratio 1) law on (0, 4 mu]: the semicircle in sqrt(z)."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    z = np.asarray(z, dtype=float)
    inside = (z > 0) & (z < 4.0 * mu)
    out = np.zeros_like(z)
    zz = z[inside]
    out[inside] = np.sqrt(zz * (4.0 * mu - zz)) / (2.0 * pi * mu * zz)
    return out if out.ndim else float(out)


def mean_entropy_prediction(D: int, N: int, M: int) -> float:
    """Ensemble-average entropy: the maximum minus (trace/2) * shape ratio.

    At M = N/2 the ratio is 1 and the deficit is the constant C(N,M)/2;
    for M < N/2 the deficit vanishes as the ratio does.
    """
    if not 1 <= M <= N / 2:
        raise ValueError(f"need 1 <= M <= N/2, got M={M}")
    c = predicted_moments(D, N, M).c
    return max_entropy(D, N, M) - comb(N, M) * c / 2.0


def equal_cut_linear_moment() -> float:
    """(1/4) <x> under the unit square-case law; evaluates to 1/16."""
    val, err = quad(lambda t: np.sin(t) ** 2 * np.cos(t) ** 2 * 4.0 / pi, 0, pi / 2)
    if err > 1e-9:
        raise RuntimeError(f"quadrature error {err}")
    return 0.25 * val


def equal_cut_xlogx_moment() -> float:
    """(1/4) <x ln x> under the unit square-case law (enters the mean-entropy
    deficit); adaptive quadrature on the substitution x = sin^2 t."""

    def integrand(t):
        x = np.sin(t) ** 2
        return np.where(x > 0, x * np.log(np.maximum(x, 1e-300)), 0.0) * np.cos(
            t
        ) ** 2 * 4.0 / pi

    val, err = quad(integrand, 0, pi / 2, epsabs=1e-10, limit=200)
    if err > 1e-8:
        raise RuntimeError(f"quadrature error {err}")
    return 0.25 * val


# --- CDFs and the KS statistic -------------------------------------------------


def semicircle_cdf(z, mu: float, sigma: float):
    z = np.asarray(z, dtype=float)
    t = np.clip((z - mu) / (2.0 * sigma), -1.0, 1.0)
    return 0.5 + (t * np.sqrt(1.0 - t**2) + np.arcsin(t)) / pi


def numeric_cdf(pdf, lo: float, hi: float, z, pts: int = 40001):
    """CDF of a bounded density by dense trapezoid integration."""
    xs = np.linspace(lo, hi, pts)
    ys = pdf(xs)
    cum = np.concatenate([[0.0], np.cumsum((ys[1:] + ys[:-1]) * 0.5 * np.diff(xs))])
    cum /= cum[-1]
    return np.interp(np.asarray(z, dtype=float), xs, cum, left=0.0, right=1.0)


def ks_statistic(samples: np.ndarray, cdf_at_samples: np.ndarray) -> float:
    """One-sample Kolmogorov-Smirnov distance for sorted samples."""
    n = len(samples)
    i = np.arange(1, n + 1)
    return float(
        max(
            np.max(np.abs(i / n - cdf_at_samples)),
            np.max(np.abs((i - 1) / n - cdf_at_samples)),
        )
    )


# --- ensemble runs --------------------------------------------------------------

SEMICIRCLE_REGIME_C = 0.05  # below this shape ratio the semicircle CDF is "matched"


@dataclass
class EnsembleConfig:
    D: int
    N: int
    M: int
    realizations: int
    seed: int
    bins: int = 60
    kind: str = "state"  # "state" | "wl"

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if not 1 <= self.M <= self.N - 1:
            raise ValueError(f"need 1 <= M <= N-1, got M={self.M}")
        if self.kind not in ("state", "wl"):
            raise ValueError(f"kind must be 'state' or 'wl', got {self.kind!r}")
        if not 1 <= self.N <= self.D <= 64:
            raise ValueError(f"need 1 <= N <= D <= 64")
        if self.bins < 1:
            raise ValueError("bins must be positive")


@dataclass
class EnsembleReport:
    config: EnsembleConfig
    mu: float
    sigma: float
    c: float
    s_max: float
    predicted_mean_entropy: float | None
    empirical_mean: float
    empirical_std: float
    mean_entropy: float
    ks_semicircle: float
    ks_mp: float
    matched_model: str
    bin_edges: np.ndarray
    empirical_density: np.ndarray
    analytic_semicircle: np.ndarray
    analytic_mp: np.ndarray
    eigenvalue_count: int

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "D": cfg.D,
                "N": cfg.N,
                "M": cfg.M,
                "realizations": cfg.realizations,
                "seed": cfg.seed,
                "bins": cfg.bins,
                "kind": cfg.kind,
            },
            "mu": self.mu,
            "sigma": self.sigma,
            "c": self.c,
            "S_max": self.s_max,
            "predicted_mean_entropy": self.predicted_mean_entropy,
            "empirical_mean": self.empirical_mean,
            "empirical_std": self.empirical_std,
            "mean_entropy": self.mean_entropy,
            "ks_semicircle": self.ks_semicircle,
            "ks_mp": self.ks_mp,
            "matched_model": self.matched_model,
            "eigenvalue_count": self.eigenvalue_count,
        }


def _cut_eigenvalues(amps: np.ndarray, D: int, N: int, M: int) -> np.ndarray:
    """Nonzero-block eigenvalues of the M-cut of a dense state, ascending.

    The Gram matrix of the smaller cut side carries the C(D, min(M, N-M))
    eigenvalues shared by both cuts; the remaining padding zeros are excluded
    by construction.
    """
    g = dense_amplitude_matrix(amps, D, N, M)
    n, m = g.shape
    gram = g @ g.conj().T if n <= m else g.conj().T @ g
    return np.linalg.eigvalsh(gram)


def run_ensemble(cfg: EnsembleConfig) -> EnsembleReport:
    """Pool cut eigenvalues and entropies over seeded independent realizations.

    Realization r draws from the stream mix_seed(cfg.seed, r), so the report
    does not depend on evaluation order.
    """
    mom = predicted_moments(cfg.D, cfg.N, cfg.M)
    trace = comb(cfg.N, cfg.M)
    n = comb(cfg.D, cfg.M)
    m = comb(cfg.D, cfg.N - cfg.M)
    n_wl, m_wl = min(n, m), max(n, m)

    all_eigs = []
    entropies = np.empty(cfg.realizations)
    for r in range(cfg.realizations):
        seed_r = mix_seed(cfg.seed, r)
        if cfg.kind == "state":
            amps = _amplitude_vector(cfg.D, cfg.N, _rng(seed_r))
            vals = _cut_eigenvalues(amps, cfg.D, cfg.N, cfg.M)
        else:
            w = sample_trace_fixed_wishart(n_wl, m_wl, float(trace), seed_r)
            vals = np.linalg.eigvalsh(w)
        vals = np.where((vals < 0) & (vals > -1e-10), 0.0, vals)
        if vals.min() < 0:
            raise RuntimeError(
                f"realization {r}: eigenvalue {vals.min():.3e} below tolerance"
            )
        if abs(vals.sum() - trace) > 1e-8:
            raise RuntimeError(
                f"realization {r}: eigenvalue sum {vals.sum()!r} != {trace}"
            )
        all_eigs.append(vals)
        entropies[r] = entropy_from_eigenvalues(vals)

    pooled = np.sort(np.concatenate(all_eigs))
    c_one = mom.c >= 1.0 - 1e-12
    if c_one:
        lo_h, hi_h = 0.0, 4.0 * mom.mu * 1.05
    else:
        lo_h, hi_h = max(0.0, mom.mu - 3.0 * mom.sigma), mom.mu + 3.0 * mom.sigma
    edges = np.linspace(lo_h, hi_h, cfg.bins + 1)
    counts, _ = np.histogram(pooled, bins=edges)
    widths = np.diff(edges)
    emp_density = counts / (len(pooled) * widths)
    centers = 0.5 * (edges[:-1] + edges[1:])

    sc_curve = semicircle_density(centers, mom.mu, mom.sigma)
    mp_curve = trace_fixed_mp_density(centers, cfg.D, cfg.N, cfg.M)

    ks_sc = ks_statistic(pooled, semicircle_cdf(pooled, mom.mu, mom.sigma))
    scale = mom.mu * mom.c
    lo_mp = 0.0 if c_one else mom.xi_minus * scale
    hi_mp = mom.xi_plus * scale
    ks_mp = ks_statistic(
        pooled,
        numeric_cdf(
            lambda z: trace_fixed_mp_density(z, cfg.D, cfg.N, cfg.M),
            lo_mp,
            hi_mp,
            pooled,
        ),
    )

    try:
        predicted = mean_entropy_prediction(cfg.D, cfg.N, cfg.M)
    except ValueError:
        predicted = None  # M above half cut: no prediction in this convention

    m_eff = min(cfg.M, cfg.N - cfg.M)  # nonzero spectra of both cuts coincide
    return EnsembleReport(
        config=cfg,
        mu=mom.mu,
        sigma=mom.sigma,
        c=mom.c,
        s_max=max_entropy(cfg.D, cfg.N, m_eff),
        predicted_mean_entropy=predicted,
        empirical_mean=float(pooled.mean()),
        empirical_std=float(pooled.std()),
        mean_entropy=float(entropies.mean()),
        ks_semicircle=ks_sc,
        ks_mp=ks_mp,
        matched_model="semicircle" if mom.c < SEMICIRCLE_REGIME_C else "mp",
        bin_edges=edges,
        empirical_density=emp_density,
        analytic_semicircle=sc_curve,
        analytic_mp=mp_curve,
        eigenvalue_count=len(pooled),
    )
