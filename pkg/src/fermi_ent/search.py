"""Existence search for maximally M-body entangled states.

Given (D, N, M), classifies the regime, enumerates overlap-admissible
hypergraph isomorphism classes (or runs an exact-cover search in the regime
where only Steiner systems qualify), decides exact LP feasibility per class,
and reconstructs a verified state from a feasible solution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .dm import reduced_density_matrix
from .fock import FermionState, orbitals_from_subset, overlap_count, subset_from_orbitals
from .hypergraph import (
    Hypergraph,
    canonical_key,
    complement,
    incidence_matrix,
    is_t_design,
    satisfies_overlap,
    subset_edge_counts,
)
from .rational_lp import feasible_point


class BudgetExceededError(RuntimeError):
    """Search stopped by the class/node/time budget."""


class Verdict(str, Enum):
    NOT_EXISTS = "not_exists"
    EXISTS = "exists"
    EXISTS_STEINER = "exists_steiner"
    EXHAUSTED_NO_SOLUTION = "exhausted_no_solution"
    UNKNOWN = "unknown"


class Regime(str, Enum):
    NOT_EXISTS = "not_exists"
    STEINER_REQUIRED = "steiner_required"
    NEEDS_SEARCH = "needs_search"


@dataclass
class SearchBudget:
    max_classes: int = 2_000_000
    max_seconds: float | None = None
    max_cover_nodes: int = 20_000_000

    def deadline(self):
        if self.max_seconds is None:
            return None
        return time.monotonic() + self.max_seconds


@dataclass
class SearchStats:
    classes_visited: int = 0
    lp_solved: int = 0
    cover_nodes: int = 0
    max_edges_reached: int = 0


@dataclass
class SearchOutcome:
    verdict: Verdict
    reason: str = ""
    state: FermionState | None = None
    hypergraph: Hypergraph | None = None
    solution: list[Fraction] | None = None
    deviation: float | None = None
    classes_visited: int = 0
    edges_range: tuple[int, int] = (0, 0)
    budget_exhausted: bool = False


@dataclass
class FeasibilityProblem:
    """Exact system A x = (C(N,M)/C(D,M)) 1 with x >= 0 over the edge weights."""

    matrix: np.ndarray  # binary C(D,M) x b
    rhs: Fraction
    b: int

    @classmethod
    def from_hypergraph(cls, hg: Hypergraph, M: int) -> "FeasibilityProblem":
        rhs = Fraction(comb(hg.N, M), comb(hg.D, M))
        return cls(incidence_matrix(hg, M), rhs, hg.num_edges)


def solve_feasibility(problem: FeasibilityProblem) -> list[Fraction] | None:
    """Exact solution of the feasibility system, or None. Verifies the result."""
    rows = problem.matrix.tolist()
    x = feasible_point(rows, [problem.rhs] * len(rows))
    if x is None:
        return None
    assert all(v >= 0 for v in x)
    assert sum(x) == 1  # normalization comes for free from the system
    for row in rows:
        assert sum(Fraction(int(a)) * v for a, v in zip(row, x)) == problem.rhs
    return x


def min_edge_count(D: int, N: int, M: int) -> int:
    """Fewest edges that can cover every M-subset at least once."""
    n, per = comb(D, M), comb(N, M)
    return (n + per - 1) // per


def classify_existence(D: int, N: int, M: int) -> tuple[Regime, str]:
    """A-priori regime of (D, N, M) from the two dimension-counting bounds."""
    if not (1 <= M and 1 <= N <= D):
        raise ValueError(f"need 1 <= M and 1 <= N <= D, got D={D}, N={N}, M={M}")
    if N < 2 * M:
        return Regime.NOT_EXISTS, f"N={N} < 2M={2 * M}: the M-cut has forced zero eigenvalues"
    if N > D - 2 * M:
        return (
            Regime.NOT_EXISTS,
            f"N={N} > D-2M={D - 2 * M}: excluded by particle-hole symmetry",
        )
    if N == 2 * M or N == D - 2 * M:
        return Regime.STEINER_REQUIRED, "boundary case: only Steiner systems qualify"
    return Regime.NEEDS_SEARCH, "interior region: existence decided by enumeration"


# --- class enumeration -------------------------------------------------------


def enumerate_admissible_classes(
    D: int,
    N: int,
    M: int,
    max_edges: int | None = None,
    budget: SearchBudget | None = None,
    stats: SearchStats | None = None,
):
    """One representative per isomorphism class of overlap-admissible hypergraphs.

    Classes are grown level by level: every admissible class with b+1 edges
    contains an admissible class with b edges (the constraint is pairwise),
    so extending all b-edge representatives by all compatible edges and
    deduplicating on canonical keys reaches every class. Only classes with at
    least min_edge_count(D, N, M) edges are yielded; generation stops when no
    class can take another edge, or raises BudgetExceededError.
    """
    budget = budget or SearchBudget()
    stats = stats if stats is not None else SearchStats()
    deadline = budget.deadline()
    limit = N - M  # any edge pair must share fewer vertices than this
    b_min = min_edge_count(D, N, M)
    all_edges = [subset_from_orbitals(c) for c in combinations(range(1, D + 1), N)]

    level = {canonical_key(Hypergraph(D, N, (all_edges[0],))): (all_edges[0],)}
    stats.classes_visited += 1
    b = 1
    while level:
        stats.max_edges_reached = b
        if b >= b_min:
            for edges in level.values():
                yield Hypergraph(D, N, edges)
        if max_edges is not None and b >= max_edges:
            return
        nxt: dict[bytes, tuple] = {}
        for edges in level.values():
            last = edges[-1]
            for e in all_edges:
                if e in edges:
                    continue
                if any(overlap_count(e, f) >= limit for f in edges):
                    continue
                child = tuple(sorted(edges + (e,)))
                key = canonical_key(Hypergraph(D, N, child))
                if key in nxt:
                    continue
                nxt[key] = child
                stats.classes_visited += 1
                if stats.classes_visited > budget.max_classes:
                    raise BudgetExceededError(
                        f"visited more than {budget.max_classes} classes"
                    )
                if deadline is not None and time.monotonic() > deadline:
                    raise BudgetExceededError("search wall-clock budget exceeded")
        level = nxt
        b += 1


# --- Steiner regime: exact cover ---------------------------------------------


def steiner_divisibility_ok(D: int, N: int, M: int) -> bool:
    """Necessary integrality conditions for an M-(D, N, 1) design."""
    for i in range(M + 1):
        if comb(D - i, M - i) % comb(N - i, M - i) != 0:
            return False
    return True


def find_steiner_system(
    D: int,
    N: int,
    M: int,
    budget: SearchBudget | None = None,
    stats: SearchStats | None = None,
) -> Hypergraph | None:
    """Search for an M-(D, N, 1) design by exact cover of the M-subsets.

    Every M-subset of 1..D must lie in exactly one chosen N-edge. Depth-first
    with a fewest-candidates-first pivot; the first edge is pinned to
    {1,..,N}, which is sound up to relabeling. Returns None when no design
    exists (after full exhaustion); raises BudgetExceededError otherwise.
    """
    budget = budget or SearchBudget()
    stats = stats if stats is not None else SearchStats()
    deadline = budget.deadline()
    if not steiner_divisibility_ok(D, N, M):
        return None

    n_subsets = comb(D, M)
    subset_rank = {}
    for i, c in enumerate(combinations(range(1, D + 1), M)):
        subset_rank[subset_from_orbitals(c)] = i

    all_edges = [subset_from_orbitals(c) for c in combinations(range(1, D + 1), N)]
    cover_mask = []
    for e in all_edges:
        mask = 0
        for c in combinations(orbitals_from_subset(e), M):
            mask |= 1 << subset_rank[subset_from_orbitals(c)]
        cover_mask.append(mask)
    by_subset = [[] for _ in range(n_subsets)]
    for k, mask in enumerate(cover_mask):
        m = mask
        while m:
            low = m & -m
            by_subset[low.bit_length() - 1].append(k)
            m ^= low

    full = (1 << n_subsets) - 1
    first = 0  # edge {1..N} is all_edges[0]
    chosen: list[int] = []

    def dfs(uncovered: int) -> bool:
        stats.cover_nodes += 1
        if stats.cover_nodes > budget.max_cover_nodes:
            raise BudgetExceededError("exact-cover node budget exceeded")
        if deadline is not None and stats.cover_nodes % 1024 == 0:
            if time.monotonic() > deadline:
                raise BudgetExceededError("exact-cover wall-clock budget exceeded")
        if uncovered == 0:
            return True
        # pivot subset with fewest compatible edges
        best_rank, best_cands = -1, None
        m = uncovered
        while m:
            low = m & -m
            r = low.bit_length() - 1
            cands = [k for k in by_subset[r] if cover_mask[k] & ~uncovered == 0]
            if best_cands is None or len(cands) < len(best_cands):
                best_rank, best_cands = r, cands
                if not cands:
                    return False
            m ^= low
        for k in best_cands:
            chosen.append(k)
            if dfs(uncovered & ~cover_mask[k]):
                return True
            chosen.pop()
        return False

    chosen.append(first)
    if dfs(full & ~cover_mask[first]):
        return Hypergraph(D, N, tuple(sorted(all_edges[k] for k in chosen)))
    return None


def cyclic_regular_family(D: int, N: int, max_overlap: int) -> Hypergraph | None:
    """A vertex-regular family with bounded pairwise overlaps, if one is cyclic.

    When N divides D the disjoint partition works. Otherwise scan base blocks
    B containing 0: the D cyclic translates of B overlap pairwise by the
    difference multiplicities of B, so any block whose ordered-difference
    counts stay within ``max_overlap`` yields a 1-design with b = D edges
    (translates are automatically distinct as the counts exclude N).
    """
    if D % N == 0:
        edges = tuple(
            subset_from_orbitals(range(b * N + 1, (b + 1) * N + 1))
            for b in range(D // N)
        )
        return Hypergraph(D, N, edges)
    for rest in combinations(range(1, D), N - 1):
        block = (0,) + rest
        counts = [0] * D
        ok = True
        for i, x in enumerate(block):
            for y in block[i + 1 :]:
                d = (y - x) % D
                counts[d] += 1
                counts[D - d] += 1
                if counts[d] > max_overlap or counts[D - d] > max_overlap:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        edges = tuple(
            subset_from_orbitals(sorted((v + k) % D + 1 for v in block))
            for k in range(D)
        )
        return Hypergraph(D, N, edges)
    return None


# --- state construction and verification -------------------------------------


def state_from_solution(
    hg: Hypergraph, x: list[Fraction]
) -> tuple[FermionState, Hypergraph]:
    """State with amplitudes sqrt(x_k) on the edges carrying weight.

    The system constrains only |amplitude|^2, so all phases are set to +1;
    off-diagonal elements vanish by the overlap criterion for any phases.
    """
    pairs = []
    support = []
    for e, xk in zip(hg.edges, x):
        if xk > 0:
            pairs.append((e, float(xk) ** 0.5))
            support.append(e)
    state = FermionState.build(hg.D, hg.N, pairs, normalize=True)
    return state, Hypergraph(hg.D, hg.N, tuple(support))


def design_to_state(hg: Hypergraph, M: int) -> FermionState:
    """Uniform-amplitude state of an M-design satisfying the overlap criterion."""
    if is_t_design(hg, M) is None:
        raise ValueError(f"hypergraph is not an {M}-design")
    if M < hg.N and not satisfies_overlap(hg, M):
        raise ValueError("design violates the overlap criterion")
    amp = 1.0 / hg.num_edges**0.5
    return FermionState.build(hg.D, hg.N, [(e, amp) for e in hg.edges])


def verify_maximal(state: FermionState, M: int, tol: float = 1e-10) -> tuple[bool, float]:
    """Max entrywise deviation of the M-cut matrix from its maximally mixed form."""
    rho = reduced_density_matrix(state, M)
    target = comb(state.N, M) / comb(state.D, M)
    dev = float(np.max(np.abs(rho.mat - target * np.eye(rho.dim))))
    return dev < tol, dev


def nesting_check(
    state: FermionState,
    M: int,
    tol: float = 1e-10,
    hypergraph: Hypergraph | None = None,
    solution: list[Fraction] | None = None,
) -> list[tuple[int, bool]]:
    """Maximality at every cut size M' = 1..M.

    When the defining exact solution is supplied, the rational identity
    A^(M') x = (C(N,M')/C(D,M')) 1 is required to hold as well.
    """
    results = []
    for mp in range(1, M + 1):
        ok, _ = verify_maximal(state, mp, tol)
        if solution is not None and hypergraph is not None:
            a = incidence_matrix(hypergraph, mp)
            rhs = Fraction(comb(state.N, mp), comb(state.D, mp))
            exact = all(
                sum(Fraction(int(v)) * xk for v, xk in zip(row, solution)) == rhs
                for row in a.tolist()
            )
            ok = ok and exact
        results.append((mp, ok))
    return results


def particle_hole_dual(state: FermionState) -> FermionState:
    """(D-N)-fermion state with every determinant orbital-complemented."""
    full = (1 << state.D) - 1
    return FermionState.build(
        state.D, state.D - state.N, [(full ^ sd, a) for sd, a in state.terms]
    )


# --- the combined search ------------------------------------------------------


def search_maximal_state(
    D: int,
    N: int,
    M: int,
    budget: SearchBudget | None = None,
    max_edges: int | None = None,
    use_duality: bool = True,
) -> SearchOutcome:
    """Decide whether (D, N, M) hosts a maximally M-body entangled state.

    Routes by regime: a-priori exclusion, exact cover for the Steiner-only
    boundary, otherwise class enumeration with exact LP feasibility. Searches
    above half filling are mapped to D-N fermions and dualized back
    (``use_duality=False`` forces the direct search; used for cross-checks).
    """
    budget = budget or SearchBudget()
    regime, reason = classify_existence(D, N, M)
    if regime is Regime.NOT_EXISTS:
        return SearchOutcome(Verdict.NOT_EXISTS, reason)
    stats = SearchStats()
    b_min = min_edge_count(D, N, M)

    if use_duality and D - N < N:
        dual = search_maximal_state(
            D, D - N, M, budget=budget, max_edges=max_edges, use_duality=False
        )
        state = particle_hole_dual(dual.state) if dual.state else None
        hg = complement(dual.hypergraph) if dual.hypergraph else None
        dev = None
        if state is not None:
            _, dev = verify_maximal(state, M)
        return SearchOutcome(
            dual.verdict,
            dual.reason + " (via particle-hole duality)",
            state=state,
            hypergraph=hg,
            solution=dual.solution,
            deviation=dev,
            classes_visited=dual.classes_visited,
            edges_range=dual.edges_range,
            budget_exhausted=dual.budget_exhausted,
        )

    if regime is Regime.STEINER_REQUIRED:
        steiner_M = M if N == 2 * M else None
        if steiner_M is None:
            # N = D - 2M boundary with N != 2M: dual side is the Steiner case
            dual = search_maximal_state(
                D, D - N, M, budget=budget, max_edges=max_edges, use_duality=False
            )
            state = particle_hole_dual(dual.state) if dual.state else None
            hg = complement(dual.hypergraph) if dual.hypergraph else None
            dev = verify_maximal(state, M)[1] if state else None
            return SearchOutcome(
                dual.verdict,
                dual.reason + " (via particle-hole duality)",
                state=state,
                hypergraph=hg,
                solution=dual.solution,
                deviation=dev,
                classes_visited=dual.classes_visited,
                edges_range=dual.edges_range,
                budget_exhausted=dual.budget_exhausted,
            )
        try:
            hg = find_steiner_system(D, N, M, budget, stats)
        except BudgetExceededError as exc:
            return SearchOutcome(
                Verdict.UNKNOWN,
                str(exc),
                classes_visited=stats.cover_nodes,
                edges_range=(b_min, stats.max_edges_reached),
                budget_exhausted=True,
            )
        if hg is None:
            return SearchOutcome(
                Verdict.EXHAUSTED_NO_SOLUTION,
                f"no {M}-({D},{N},1) design exists",
                classes_visited=stats.cover_nodes,
                edges_range=(b_min, b_min),
            )
        problem = FeasibilityProblem.from_hypergraph(hg, M)
        x = solve_feasibility(problem)
        assert x is not None  # Steiner rows have a single 1: solution is forced
        state, support = state_from_solution(hg, x)
        ok, dev = verify_maximal(state, M)
        assert ok, f"reconstructed state deviates by {dev}"
        return SearchOutcome(
            Verdict.EXISTS_STEINER,
            "Steiner system found",
            state=state,
            hypergraph=support,
            solution=x,
            deviation=dev,
            classes_visited=stats.cover_nodes,
            edges_range=(b_min, hg.num_edges),
        )

    # interior region: constructive fast path for 1-body cuts, else enumerate
    if M == 1:
        hg = cyclic_regular_family(D, N, max_overlap=N - M - 1)
        if hg is not None:
            x = [Fraction(1, hg.num_edges)] * hg.num_edges
            state, support = state_from_solution(hg, x)
            ok, dev = verify_maximal(state, M)
            assert ok, f"constructed state deviates by {dev}"
            return SearchOutcome(
                Verdict.EXISTS,
                "vertex-regular cyclic family",
                state=state,
                hypergraph=support,
                solution=x,
                deviation=dev,
                classes_visited=0,
                edges_range=(b_min, hg.num_edges),
            )

    # enumerate isomorphism classes, LP per covering class
    try:
        for hg in enumerate_admissible_classes(D, N, M, max_edges, budget, stats):
            if len(subset_edge_counts(hg, M)) != comb(D, M):
                continue  # a zero row makes the system infeasible
            stats.lp_solved += 1
            x = solve_feasibility(FeasibilityProblem.from_hypergraph(hg, M))
            if x is None:
                continue
            state, support = state_from_solution(hg, x)
            ok, dev = verify_maximal(state, M)
            assert ok, f"reconstructed state deviates by {dev}"
            return SearchOutcome(
                Verdict.EXISTS,
                "feasible class found",
                state=state,
                hypergraph=support,
                solution=x,
                deviation=dev,
                classes_visited=stats.classes_visited,
                edges_range=(b_min, stats.max_edges_reached),
            )
    except BudgetExceededError as exc:
        return SearchOutcome(
            Verdict.UNKNOWN,
            str(exc),
            classes_visited=stats.classes_visited,
            edges_range=(b_min, stats.max_edges_reached),
            budget_exhausted=True,
        )
    return SearchOutcome(
        Verdict.EXHAUSTED_NO_SOLUTION,
        "all admissible isomorphism classes exhausted",
        classes_visited=stats.classes_visited,
        edges_range=(b_min, stats.max_edges_reached),
    )
