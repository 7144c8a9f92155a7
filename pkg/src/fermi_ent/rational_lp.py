"""Exact phase-1 simplex over rationals.

Feasibility of {A x = rhs, x >= 0} is decided with Fraction arithmetic and
Bland's rule, so "infeasible" is a certificate, not a tolerance call.
"""

from __future__ import annotations

from fractions import Fraction


def feasible_point(matrix, rhs) -> list[Fraction] | None:
    """A basic feasible solution of {A x = rhs, x >= 0}, or None if infeasible.

    ``matrix`` is a list of equal-length rows (ints or Fractions); ``rhs`` a
    list of nonnegative Fractions, one per row. Minimizes the sum of one
    artificial variable per row; feasible iff the optimum is exactly zero.
    """
    m = len(matrix)
    if m == 0:
        return []
    n = len(matrix[0])
    rhs = [Fraction(v) for v in rhs]
    if any(v < 0 for v in rhs):
        raise ValueError("rhs entries must be nonnegative")

    zero, one = Fraction(0), Fraction(1)
    tab = []
    for i in range(m):
        row = [Fraction(v) for v in matrix[i]]
        row += [one if k == i else zero for k in range(m)]
        row.append(rhs[i])
        tab.append(row)
    basis = list(range(n, n + m))

    # reduced-cost row for the phase-1 objective (artificials cost 1)
    obj = [zero] * (n + m + 1)
    for j in range(n + m + 1):
        col_sum = sum(tab[i][j] for i in range(m))
        cost = one if n <= j < n + m else zero
        obj[j] = cost - col_sum
    obj[-1] = -sum(rhs)

    while True:
        enter = next((j for j in range(n + m) if obj[j] < 0), None)  # Bland
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave is None:
            return None  # cannot happen: phase-1 objective is bounded below
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        pivot_row = tab[leave]
        for i in range(m):
            f = tab[i][enter]
            if i != leave and f != 0:
                tab[i] = [a - f * b for a, b in zip(tab[i], pivot_row)]
        f = obj[enter]
        if f != 0:
            obj = [a - f * b for a, b in zip(obj, pivot_row)]
        basis[leave] = enter

    if -obj[-1] != 0:
        return None  # residual artificial mass: infeasible

    x = [zero] * n
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = tab[i][-1]
        elif tab[i][-1] != 0:
            return None
    return x
