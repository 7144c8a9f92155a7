"""Reduced density matrices of N-fermion states and their entropies.

The central objects: the bipartite amplitude matrix of a state under a cut
into M and N-M particles, the reduced density matrix obtained from it, and
entropy / spectrum utilities plus the reference states (block GHZ and the
collective-pair state).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb, log

import numpy as np

from .fock import FermionState, orbitals_from_subset, subset_from_orbitals
from .linalg import NumericalError, check_hermitian, check_unitary, jacobi_eigvalsh

EIG_CLAMP = 1e-10  # eigenvalues in [-EIG_CLAMP, 0) are round-off and clamp to 0


@lru_cache(maxsize=32)
def _binomials(D: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(comb(n, k) for k in range(D + 1)) for n in range(D + 1))


def _rank_sorted(orbs, D, M, C) -> int:
    # lexicographic rank of an ascending orbital tuple, table-driven
    rank = 0
    prev = 0
    left = M
    for c in orbs:
        for j in range(prev + 1, c):
            rank += C[D - j][left - 1]
        prev = c
        left -= 1
    return rank


@lru_cache(maxsize=16)
def split_table(D: int, N: int, M: int):
    """Scatter indices mapping determinant amplitudes into the cut matrix.

    Returns int arrays (sd_index, row, col, sign), one entry per
    (determinant, M-subset-of-it) pair: determinant ``sd_index`` (in
    lexicographic rank order over all C(D,N) determinants) contributes
    sign * amplitude to entry (row, col) of the C(D,M) x C(D,N-M) matrix.
    """
    C = _binomials(D)
    splits = []
    for idxs in combinations(range(N), M):
        rest = tuple(i for i in range(N) if i not in idxs)
        k = sum(idxs) - M * (M - 1) // 2
        splits.append((idxs, rest, -1 if k & 1 else 1))
    sd_idx, rows, cols, signs = [], [], [], []
    for i, sd in enumerate(combinations(range(1, D + 1), N)):
        for idxs, rest, sign in splits:
            alpha = tuple(sd[j] for j in idxs)
            beta = tuple(sd[j] for j in rest)
            sd_idx.append(i)
            rows.append(_rank_sorted(alpha, D, M, C))
            cols.append(_rank_sorted(beta, D, N - M, C))
            signs.append(sign)
    return (
        np.asarray(sd_idx, dtype=np.int64),
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(signs, dtype=np.int8),
    )


@dataclass
class AmplitudeMatrix:
    """State amplitudes arranged over (M-subset, (N-M)-subset) index pairs."""

    mat: np.ndarray
    D: int
    N: int
    M: int

    def frobenius_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.mat) ** 2))

    def check_norm(self, tol: float = 1e-10) -> None:
        expect = comb(self.N, self.M)
        got = self.frobenius_norm_sq()
        if abs(got - expect) > tol:
            raise ValueError(f"squared Frobenius norm {got} != {expect}")


class DensityMatrix:
    """Hermitian PSD matrix of M-fermion correlations, trace C(N, M)."""

    def __init__(self, mat: np.ndarray, D: int, N: int, M: int):
        self.mat = mat
        self.D = D
        self.N = N
        self.M = M
        self._spectrum = None

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def spectrum(self, hermitian_tol: float = 1e-10) -> np.ndarray:
        """Eigenvalues sorted in descending order, cached.

        Negative round-off in [-1e-10, 0) is clamped to zero; anything more
        negative raises NumericalError.
        """
        if self._spectrum is None:
            check_hermitian(self.mat, hermitian_tol)
            vals = jacobi_eigvalsh(self.mat)
            self._spectrum = clamp_spectrum(vals)[::-1].copy()
        return self._spectrum

    def validate(self, trace_tol: float = 1e-10) -> None:
        check_hermitian(self.mat, 1e-12)
        expect = comb(self.N, self.M)
        if abs(self.trace - expect) > trace_tol:
            raise ValueError(f"trace {self.trace} != {expect}")
        self.spectrum()  # raises NumericalError on eigenvalues below the clamp window


def clamp_spectrum(vals: np.ndarray, clamp: float = EIG_CLAMP) -> np.ndarray:
    vals = np.asarray(vals, dtype=float)
    if vals.size and vals.min() < -clamp:
        raise NumericalError(f"eigenvalue {vals.min():.3e} below -{clamp:.0e}")
    return np.where(vals < 0, 0.0, vals)


def amplitude_matrix(state: FermionState, M: int) -> AmplitudeMatrix:
    """Arrange a state's amplitudes into the C(D,M) x C(D,N-M) cut matrix.

    Entry (rank(alpha), rank(beta)) holds split_sign(sd, alpha) * amplitude
    for each determinant sd and each M-subset alpha of it, beta = sd \\ alpha.
    """
    D, N = state.D, state.N
    if not 1 <= M <= N - 1:
        raise ValueError(f"cut size M must satisfy 1 <= M <= N-1, got {M}")
    C = _binomials(D)
    mat = np.zeros((comb(D, M), comb(D, N - M)), dtype=np.complex128)
    for sd, amp in state.terms:
        orbs = orbitals_from_subset(sd)
        for idxs in combinations(range(N), M):
            alpha = tuple(orbs[j] for j in idxs)
            beta = tuple(orbs[j] for j in range(N) if j not in idxs)
            k = sum(idxs) - M * (M - 1) // 2
            sign = -1 if k & 1 else 1
            mat[_rank_sorted(alpha, D, M, C), _rank_sorted(beta, D, N - M, C)] = (
                sign * amp
            )
    return AmplitudeMatrix(mat, D, N, M)


def dense_amplitude_matrix(amps: np.ndarray, D: int, N: int, M: int) -> np.ndarray:
    """Cut matrix from a full amplitude vector over all C(D,N) determinants.

    Bulk counterpart of :func:`amplitude_matrix` for dense states; uses the
    cached scatter table so repeated calls at the same (D, N, M) cost one
    fancy assignment.
    """
    sd_idx, rows, cols, signs = split_table(D, N, M)
    mat = np.zeros((comb(D, M), comb(D, N - M)), dtype=np.complex128)
    mat[rows, cols] = signs * amps[sd_idx]
    return mat


def reduced_density_matrix(state: FermionState, M: int) -> DensityMatrix:
    """M-body reduced density matrix of a state (trace C(N, M))."""
    g = amplitude_matrix(state, M)
    return DensityMatrix(g.mat @ g.mat.conj().T, state.D, state.N, M)


def entropy_from_eigenvalues(vals) -> float:
    """Von Neumann entropy -sum l ln l in nats, with 0 ln 0 = 0."""
    vals = clamp_spectrum(np.asarray(vals, dtype=float))
    pos = vals[vals > 0]
    return float(-np.sum(pos * np.log(pos)))


def entropy(dm: DensityMatrix) -> float:
    return entropy_from_eigenvalues(dm.spectrum())


def max_entropy(D: int, N: int, M: int) -> float:
    """Largest possible M-body entropy, C(N,M) ln[C(D,M)/C(N,M)], in nats."""
    if not 1 <= M <= N <= D:
        raise ValueError(f"need 1 <= M <= N <= D, got D={D}, N={N}, M={M}")
    return comb(N, M) * log(comb(D, M) / comb(N, M))


def normalized_entropy(dm: DensityMatrix) -> float:
    """Entropy of the unit-trace density matrix rho / C(N, M)."""
    t = comb(dm.N, dm.M)
    return entropy(dm) / t + log(t)


def ghz_state(D: int, r: int) -> FermionState:
    """Equal superposition of r disjoint consecutive-block determinants."""
    if r < 1 or D % r != 0:
        raise ValueError(f"r={r} must divide D={D}")
    N = D // r
    amp = 1.0 / np.sqrt(r)
    terms = [
        (subset_from_orbitals(range(b * N + 1, (b + 1) * N + 1)), amp)
        for b in range(r)
    ]
    return FermionState.build(D, N, terms)


def paired_state(D: int, k: int) -> FermionState:
    """N=2k fermions distributed over k of the D/2 pairs (2i-1, 2i).

    Expansion of the k-th power of the collective pair-creation operator:
    all C(D/2, k) placements of k disjoint pairs, with equal amplitudes.
    """
    if D % 2 != 0:
        raise ValueError(f"D={D} must be even")
    if not 0 < k <= D // 2:
        raise ValueError(f"need 0 < k <= D/2, got k={k}")
    amp = 1.0 / np.sqrt(comb(D // 2, k))
    terms = []
    for pairs in combinations(range(1, D // 2 + 1), k):
        orbs = []
        for p in pairs:
            orbs.extend((2 * p - 1, 2 * p))
        terms.append((subset_from_orbitals(orbs), amp))
    return FermionState.build(D, 2 * k, terms)


def rotate_basis(
    state: FermionState, u: np.ndarray, drop_tol: float = 1e-14
) -> FermionState:
    """Re-expand a state after the single-particle rotation c_i -> sum_k u[i,k] c_k.

    The amplitude on a target determinant J is sum_I amp(I) det(u[I, J]).
    Amplitudes below ``drop_tol`` are discarded and the result renormalized.
    """
    D, N = state.D, state.N
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (D, D):
        raise ValueError(f"unitary must be {D}x{D}")
    check_unitary(u)
    targets = list(combinations(range(D), N))
    col_idx = np.array(targets, dtype=np.intp)  # (num_targets, N), 0-based
    new_amps = np.zeros(len(targets), dtype=np.complex128)
    for sd, amp in state.terms:
        rows = [i - 1 for i in orbitals_from_subset(sd)]
        sub = u[rows, :][:, col_idx]  # (N, num_targets, N)
        dets = np.linalg.det(np.transpose(sub, (1, 0, 2)))
        new_amps += amp * dets
    pairs = [
        (subset_from_orbitals(i + 1 for i in t), a)
        for t, a in zip(targets, new_amps)
        if abs(a) > drop_tol
    ]
    return FermionState.build(D, N, pairs, normalize=True)


def spectra_match(
    state: FermionState, M: int, zero_tol: float = 1e-9, match_tol: float = 1e-8
) -> tuple[bool, float]:
    """Whether the nonzero spectra of the M and N-M cuts agree as multisets.

    Returns (match, max deviation between the paired sorted eigenvalues).
    """
    a = reduced_density_matrix(state, M).spectrum()
    b = reduced_density_matrix(state, state.N - M).spectrum()
    a = a[a > zero_tol]
    b = b[b > zero_tol]
    if len(a) != len(b):
        return False, float("inf")
    dev = float(np.max(np.abs(a - b))) if len(a) else 0.0
    return dev < match_tol, dev


@dataclass
class SubadditivityResult:
    holds: bool
    slack: float
    strong_holds: bool | None = None
    strong_slack: float | None = None


def subadditivity_check(
    state: FermionState, M1: int, M2: int, M3: int | None = None, tol: float = 1e-9
) -> SubadditivityResult:
    """Mutual-information inequalities for the unit-trace cut entropies.

    Checks S_n(M1+M2) <= S_n(M1) + S_n(M2) and, when M3 is given, the strong
    form S_n(M1+M2+M3) <= S_n(M1+M3) + S_n(M2+M3) - S_n(M3). Slack is
    RHS - LHS; "holds" allows slack >= -tol.
    """
    if min(M1, M2, M3 if M3 is not None else 1) < 1:
        raise ValueError("cut sizes must be positive")
    if M1 + M2 + (M3 or 0) > state.N:
        raise ValueError("cut sizes exceed particle count")

    def s_n(m):
        if m == state.N:
            # rank-1 full cut: the state itself, entropy exactly 0
            return 0.0
        return normalized_entropy(reduced_density_matrix(state, m))

    slack = s_n(M1) + s_n(M2) - s_n(M1 + M2)
    res = SubadditivityResult(holds=slack >= -tol, slack=float(slack))
    if M3 is not None:
        strong = s_n(M1 + M3) + s_n(M2 + M3) - s_n(M3) - s_n(M1 + M2 + M3)
        res.strong_holds = strong >= -tol
        res.strong_slack = float(strong)
    return res
