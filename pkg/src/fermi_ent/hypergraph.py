"""N-uniform hypergraphs: incidence matrices, designs, complements, canonical keys.

Vertices are orbitals 1..D, edges are N-vertex bitmasks; a hypergraph is the
combinatorial skeleton of a determinant expansion (one edge per determinant).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .fock import (
    BitSet,
    check_subset,
    orbitals_from_subset,
    overlap_count,
    rank_subset,
    subset_from_orbitals,
    subsets_of,
)


class CanonicalBudgetError(RuntimeError):
    """Canonical-form search exceeded its node budget."""


@dataclass(frozen=True)
class Hypergraph:
    D: int
    N: int
    edges: tuple[BitSet, ...]

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            check_subset(e, self.D)
            if e.bit_count() != self.N:
                raise ValueError(
                    f"edge {orbitals_from_subset(e)} is not {self.N}-uniform"
                )
            if e in seen:
                raise ValueError(f"duplicate edge {orbitals_from_subset(e)}")
            seen.add(e)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_orbitals(self) -> list[tuple[int, ...]]:
        return [orbitals_from_subset(e) for e in self.edges]


def incidence_matrix(hg: Hypergraph, M: int) -> np.ndarray:
    """Binary C(D,M) x b matrix: entry (rank(beta), k) = 1 iff beta is in edge k.

    For M=1 this is the ordinary vertex-edge incidence matrix.
    """
    if not 1 <= M <= hg.N:
        raise ValueError(f"need 1 <= M <= N, got M={M}")
    a = np.zeros((comb(hg.D, M), hg.num_edges), dtype=np.uint8)
    for k, e in enumerate(hg.edges):
        for beta in subsets_of(e, M):
            a[rank_subset(beta, hg.D, M), k] = 1
    return a


def satisfies_overlap(hg: Hypergraph, M: int) -> bool:
    """True iff every edge pair shares fewer than N - M vertices."""
    if not 1 <= M < hg.N:
        raise ValueError(f"need 1 <= M < N, got M={M}")
    limit = hg.N - M
    for i, a in enumerate(hg.edges):
        for b in hg.edges[i + 1 :]:
            if overlap_count(a, b) >= limit:
                return False
    return True


def subset_edge_counts(hg: Hypergraph, t: int) -> dict[BitSet, int]:
    """How many edges contain each t-subset (subsets in no edge are absent)."""
    counts: dict[BitSet, int] = {}
    for e in hg.edges:
        for beta in subsets_of(e, t):
            counts[beta] = counts.get(beta, 0) + 1
    return counts


def is_t_design(hg: Hypergraph, t: int):
    """The replication count lambda if every t-subset lies in exactly that
    many edges, else None."""
    if not 1 <= t <= hg.N:
        raise ValueError(f"need 1 <= t <= N, got t={t}")
    if hg.num_edges == 0:
        return None
    counts = subset_edge_counts(hg, t)
    if len(counts) != comb(hg.D, t):
        return None  # some t-subset is uncovered
    values = set(counts.values())
    if len(values) != 1:
        return None
    return values.pop()


def is_steiner(hg: Hypergraph, t: int) -> bool:
    return is_t_design(hg, t) == 1


def design_lambda_relation(hg: Hypergraph, t: int, lam: int) -> bool:
    """Counting identity lambda * C(D,t) = b * C(N,t) for a t-design."""
    return lam * comb(hg.D, t) == hg.num_edges * comb(hg.N, t)


def complement(hg: Hypergraph) -> Hypergraph:
    """Replace every edge by its vertex complement; result is (D-N)-uniform."""
    full = (1 << hg.D) - 1
    return Hypergraph(hg.D, hg.D - hg.N, tuple(full ^ e for e in hg.edges))


# --- canonical form ---------------------------------------------------------
#
# The key is the lexicographically smallest relabeled edge multiset over all
# vertex bijections, found by a depth-first search over label assignments.
# Pruning: vertices are pre-partitioned by an iterated (degree, co-degree)
# invariant; vertices contained in exactly the same edges ("twins") are
# interchangeable, so only one per twin class is tried at each step; and a
# branch is abandoned as soon as its partial signature exceeds the best one.


def _vertex_partition(D: int, edges: tuple[BitSet, ...]) -> list[int]:
    """Order-invariant color per vertex, refined by degree then pair co-degree.

    Color values are ranks of sorted signatures, so relabeling the vertices
    permutes the colors without changing their values.
    """
    pair = [[0] * D for _ in range(D)]
    for e in edges:
        verts = [v - 1 for v in orbitals_from_subset(e)]
        for i, v in enumerate(verts):
            for w in verts[i + 1 :]:
                pair[v][w] += 1
                pair[w][v] += 1
    colors = [sum(1 for e in edges if e >> v & 1) for v in range(D)]
    while True:
        sigs = []
        for v in range(D):
            co = sorted(
                (pair[v][w], colors[w]) for w in range(D) if pair[v][w] > 0
            )
            sigs.append((colors[v], tuple(co)))
        ranks = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def canonical_key(hg: Hypergraph, max_nodes: int = 2_000_000) -> bytes:
    """Isomorphism-invariant key: equal keys iff equal up to vertex relabeling.

    Raises CanonicalBudgetError when the pruned permutation search exceeds
    ``max_nodes`` assignments.
    """
    D, N, edges = hg.D, hg.N, hg.edges
    b = len(edges)
    support = [v for v in range(D) if any(e >> v & 1 for e in edges)]
    s = len(support)

    header = bytes([D, N]) + b.to_bytes(4, "big") + bytes([s])
    if b == 0:
        return header

    colors = _vertex_partition(D, edges)
    # twin classes: vertices lying in exactly the same set of edges
    membership = {
        v: frozenset(k for k, e in enumerate(edges) if e >> v & 1) for v in support
    }
    twin_of: dict[frozenset, int] = {}
    twin_rep = {}
    for v in support:
        twin_rep[v] = twin_of.setdefault(membership[v], v)

    best: list[tuple[int, ...]] | None = None
    nodes = 0

    def extend(assigned: set, masks: list[int], prefix: list[tuple[int, ...]]):
        nonlocal best, nodes
        level = len(assigned)
        if level == s:
            if best is None or prefix < best:
                best = list(prefix)
            return
        # candidates: unassigned support vertices of the smallest remaining
        # color, one per twin class (unassigned twins are interchangeable)
        seen_twins = set()
        scored = []
        min_color = min(colors[v] for v in support if v not in assigned)
        for v in support:
            if v in assigned or colors[v] != min_color:
                continue
            if twin_rep[v] in seen_twins:
                continue
            seen_twins.add(twin_rep[v])
            new_masks = [
                m | (1 << level) if edges[k] >> v & 1 else m
                for k, m in enumerate(masks)
            ]
            scored.append((tuple(sorted(new_masks)), v, new_masks))
        scored.sort(key=lambda t: t[0])
        for sig, v, new_masks in scored:
            nodes += 1
            if nodes > max_nodes:
                raise CanonicalBudgetError(
                    f"canonical key search exceeded {max_nodes} nodes"
                )
            prefix.append(sig)
            if best is not None and prefix > best[: len(prefix)]:
                prefix.pop()
                continue
            assigned.add(v)
            extend(assigned, new_masks, prefix)
            assigned.discard(v)
            prefix.pop()

    extend(set(), [0] * b, [])
    assert best is not None
    edge_bytes = b"".join(m.to_bytes((s + 7) // 8, "big") for m in best[-1])
    return header + edge_bytes


def canonical_representative(hg: Hypergraph) -> Hypergraph:
    """A concrete hypergraph whose edge set realizes the canonical key."""
    key = canonical_key(hg)
    s = key[6]
    width = (s + 7) // 8
    body = key[7:]
    edges = []
    for i in range(hg.num_edges):
        mask = int.from_bytes(body[i * width : (i + 1) * width], "big")
        edges.append(mask)
    return Hypergraph(hg.D, hg.N, tuple(sorted(edges)))


# --- reference design -------------------------------------------------------


def projective_plane_order3() -> Hypergraph:
    """The 2-(13, 4, 1) design: points and lines of the order-3 projective plane.

    Points are the 13 one-dimensional subspaces of F_3^3 (normalized so the
    first nonzero coordinate is 1); a line collects the 4 points orthogonal
    to a dual point.
    """
    points = []
    for x in range(3):
        for y in range(3):
            for z in range(3):
                v = (x, y, z)
                if v == (0, 0, 0):
                    continue
                for c in v:
                    if c != 0:
                        if c == 1:
                            points.append(v)
                        break
    assert len(points) == 13
    index = {p: i + 1 for i, p in enumerate(points)}
    edges = []
    for ell in points:  # dual plane has the same normalized representatives
        line = [
            index[p]
            for p in points
            if (p[0] * ell[0] + p[1] * ell[1] + p[2] * ell[2]) % 3 == 0
        ]
        assert len(line) == 4
        edges.append(subset_from_orbitals(line))
    return Hypergraph(13, 4, tuple(sorted(edges)))


def complete_hypergraph(D: int, N: int) -> Hypergraph:
    return Hypergraph(
        D,
        N,
        tuple(subset_from_orbitals(c) for c in combinations(range(1, D + 1), N)),
    )


# --- text format -------------------------------------------------------------
#
# Header line "D N", then one edge per line as space-separated 1-based vertices.


def format_hypergraph(hg: Hypergraph) -> str:
    lines = [f"{hg.D} {hg.N}"]
    for e in hg.edges:
        lines.append(" ".join(str(v) for v in orbitals_from_subset(e)))
    return "\n".join(lines) + "\n"


def parse_hypergraph(text: str) -> Hypergraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty hypergraph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"header must be 'D N', got {lines[0]!r}")
    D, N = int(head[0]), int(head[1])
    edges = []
    for ln in lines[1:]:
        verts = [int(tok) for tok in ln.split()]
        if len(verts) != N:
            raise ValueError(f"edge {verts} does not have {N} vertices")
        edges.append(subset_from_orbitals(verts))
    return Hypergraph(D, N, tuple(edges))
