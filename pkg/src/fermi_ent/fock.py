"""Bitset encodings of orbitals, Slater determinants and N-fermion states.

Orbitals are labeled 1..D externally; internally orbital i occupies bit i-1
of a plain Python int, so a subset of orbitals is just a bitmask. D is capped
at 64 so every subset fits a machine word.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

MAX_ORBITALS = 64

BitSet = int


def subset_from_orbitals(orbitals) -> BitSet:
    """Build a bitmask from an iterable of 1-based orbital labels."""
    bits = 0
    for i in orbitals:
        i = int(i)  # tolerate numpy integers
        if i < 1:
            raise ValueError(f"orbital labels are 1-based, got {i}")
        b = 1 << (i - 1)
        if bits & b:
            raise ValueError(f"duplicate orbital {i}")
        bits |= b
    return bits


def orbitals_from_subset(bits: BitSet) -> tuple[int, ...]:
    """Ascending 1-based orbital labels of a bitmask."""
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length())
        bits ^= low
    return tuple(out)


def check_subset(bits: BitSet, D: int) -> None:
    if D < 1 or D > MAX_ORBITALS:
        raise ValueError(f"orbital count D must be in 1..{MAX_ORBITALS}, got {D}")
    if bits < 0 or bits >> D:
        raise ValueError(f"subset {bits:#x} has orbitals outside 1..{D}")


def rank_subset(bits: BitSet, D: int, M: int) -> int:
    """Lexicographic rank of an M-orbital subset among all C(D, M) subsets.

    The lexicographically smallest subset {1,..,M} maps to 0 and
    {D-M+1,..,D} maps to C(D,M)-1. Inverse of :func:`unrank_subset`.
    """
    check_subset(bits, D)
    if bits.bit_count() != M:
        raise ValueError(f"subset has {bits.bit_count()} orbitals, expected {M}")
    rank = 0
    prev = 0
    left = M
    for pos, c in enumerate(orbitals_from_subset(bits)):
        for j in range(prev + 1, c):
            rank += comb(D - j, left - 1)
        prev = c
        left -= 1
    return rank


def unrank_subset(rank: int, D: int, M: int) -> BitSet:
    """Subset of size M with the given lexicographic rank."""
    if not 0 <= rank < comb(D, M):
        raise ValueError(f"rank {rank} out of range [0, {comb(D, M)})")
    bits = 0
    c = 1
    for left in range(M, 0, -1):
        while True:
            block = comb(D - c, left - 1)
            if rank < block:
                break
            rank -= block
            c += 1
        bits |= 1 << (c - 1)
        c += 1
    return bits


def split_sign(sd: BitSet, alpha: BitSet) -> int:
    """Parity of reordering a determinant's sorted orbital list into (alpha, rest).

    Returns (-1)**k where k counts the transpositions needed to move the
    orbitals of ``alpha`` to the front of the sorted occupied list while
    keeping relative order inside both groups.
    """
    if alpha & ~sd:
        raise ValueError("alpha is not a subset of the determinant")
    k = 0
    own = 0
    rest = alpha
    while rest:
        low = rest & -rest
        k += (sd & (low - 1)).bit_count() - own
        own += 1
        rest ^= low
    return -1 if k & 1 else 1


def overlap_count(a: BitSet, b: BitSet) -> int:
    """Number of orbitals occupied in both determinants."""
    return (a & b).bit_count()


def subsets_of(bits: BitSet, M: int):
    """Yield all M-orbital sub-bitmasks of a bitmask."""
    orbs = orbitals_from_subset(bits)
    for combo in combinations(orbs, M):
        yield subset_from_orbitals(combo)


@dataclass(frozen=True)
class FermionState:
    """Normalized N-fermion state as a weighted list of Slater determinants.

    ``terms`` holds (occupied-bitmask, amplitude) pairs sorted by subset rank;
    the amplitude is the expansion coefficient for the ascending orbital order
    of that determinant. All other index orders follow from antisymmetry via
    :func:`split_sign`.
    """

    D: int
    N: int
    terms: tuple[tuple[BitSet, complex], ...]

    def __post_init__(self):
        if not 1 <= self.N <= self.D:
            raise ValueError(f"need 1 <= N <= D, got N={self.N}, D={self.D}")
        if self.D > MAX_ORBITALS:
            raise ValueError(f"D must be <= {MAX_ORBITALS}")
        if not self.terms:
            raise ValueError("state has no terms")
        seen = set()
        norm2 = 0.0
        for sd, amp in self.terms:
            check_subset(sd, self.D)
            if sd.bit_count() != self.N:
                raise ValueError(
                    f"determinant {orbitals_from_subset(sd)} has "
                    f"{sd.bit_count()} orbitals, expected {self.N}"
                )
            if sd in seen:
                raise ValueError(f"duplicate determinant {orbitals_from_subset(sd)}")
            seen.add(sd)
            if amp == 0:
                raise ValueError("zero amplitude stored")
            norm2 += abs(amp) ** 2
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm2!r}")

    @classmethod
    def build(cls, D, N, pairs, normalize=False, drop_tol=0.0) -> "FermionState":
        """Create a state from (bitmask, amplitude) pairs.

        With ``normalize`` the amplitudes are rescaled to unit norm; amplitudes
        with magnitude <= drop_tol are discarded first.
        """
        kept = [(sd, complex(a)) for sd, a in pairs if abs(a) > drop_tol]
        if not kept:
            raise ValueError("no amplitudes above threshold")
        if normalize:
            norm = sum(abs(a) ** 2 for _, a in kept) ** 0.5
            kept = [(sd, a / norm) for sd, a in kept]
        kept.sort(key=lambda t: rank_subset(t[0], D, N))
        return cls(D, N, tuple(kept))

    def amplitudes(self) -> dict[BitSet, complex]:
        return dict(self.terms)

    def num_terms(self) -> int:
        return len(self.terms)
