"""Exact linear algebra over the integers and rationals.

Dimension counting must be exact, so matrix rank is computed by
fraction-free integer elimination (cross-multiplication with gcd row
reduction); nothing ever leaves the integers and no floating point is
involved.  Feasibility of strict sign constraints is decided by a small
phase-1 simplex over ``fractions.Fraction`` with Bland's rule, which
terminates and never rounds.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import ValidationError

__all__ = ["exact_rank", "feasible_with_margin"]


def _as_int(v) -> int:
    iv = int(v)
    if iv != v:
        raise ValidationError(f"exact arithmetic needs integer entries, got {v!r}")
    return iv


def exact_rank(matrix: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals of an integer matrix.

    Elimination replaces row_i by ``pivot * row_i - m * row_pivot'' and then
    divides each updated row by its gcd to keep entries small; rows with a
    zero multiplier are left untouched.  Row operations with a nonzero
    pivot preserve the row space, so the count of pivots is the rank.
    """
    rows = [[_as_int(v) for v in row] for row in matrix]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    for row in rows:
        if len(row) != nc:
            raise ValidationError("ragged matrix")
    rank = 0
    r = 0
    for col in range(nc):
        if r == nr:
            break
        pivot = -1
        for i in range(r, nr):
            v = rows[i][col]
            if v != 0 and (pivot < 0 or abs(v) < abs(rows[pivot][col])):
                pivot = i
        if pivot < 0:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        prow = rows[r]
        piv = prow[col]
        for i in range(r + 1, nr):
            v = rows[i][col]
            if v == 0:
                continue
            old = rows[i]
            # entries left of `col` are already zero in both rows
            new = old[:col] + [
                piv * a - v * b for a, b in zip(old[col:], prow[col:])
            ]
            g = 0
            for x in new:
                if x:
                    g = math.gcd(g, x)
                    if g == 1:
                        break
            if g > 1:
                new = [x // g for x in new]
            rows[i] = new
        r += 1
        rank += 1
    return rank


def _phase1_minimum(
    tableau: list[list[Fraction]], rhs: list[Fraction], cost: list[Fraction], basis: list[int]
) -> Fraction:
    """Minimize ``cost . y`` over ``tableau . y = rhs, y >= 0``.

    ``basis`` must index an identity submatrix with ``rhs >= 0``.  Bland's
    rule on entering and leaving variables guarantees termination.
    """
    k = len(tableau)
    width = len(tableau[0])
    while True:
        entering = -1
        for j in range(width):
            reduced = cost[j] - sum(cost[basis[i]] * tableau[i][j] for i in range(k))
            if reduced < 0:
                entering = j
                break
        if entering < 0:
            return sum(cost[basis[i]] * rhs[i] for i in range(k))
        leave = -1
        best = None
        for i in range(k):
            t = tableau[i][entering]
            if t > 0:
                ratio = rhs[i] / t
                if best is None or ratio < best or (
                    ratio == best and basis[i] < basis[leave]
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            # phase-1 objectives are bounded below by zero; unbounded means a bug
            raise AssertionError("phase-1 simplex claims an unbounded objective")
        piv = tableau[leave][entering]
        tableau[leave] = [x / piv for x in tableau[leave]]
        rhs[leave] = rhs[leave] / piv
        for i in range(k):
            if i != leave and tableau[i][entering] != 0:
                factor = tableau[i][entering]
                tableau[i] = [
                    tableau[i][j] - factor * tableau[leave][j] for j in range(width)
                ]
                rhs[i] = rhs[i] - factor * rhs[leave]
        basis[leave] = entering


def feasible_with_margin(
    rows: Sequence[Sequence[int]], margin: int | Fraction = 1
) -> bool:
    """Is there a real vector x with ``row . x >= margin`` for every row?

    Decided exactly by a phase-1 simplex over the rationals: write
    ``x = u - v`` with ``u, v >= 0``, add surplus variables, and drive the
    artificial variables to zero.  The margin turns strict sign constraints
    into a closed system; ``sign`` is scale invariant, so any fixed positive
    margin decides the same question.
    """
    margin = Fraction(margin)
    if margin <= 0:
        raise ValidationError("margin must be positive (0 would always be feasible)")
    rows = [[_as_int(v) for v in row] for row in rows]
    if not rows:
        return True
    m = len(rows[0])
    for row in rows:
        if len(row) != m:
            raise ValidationError("ragged constraint matrix")
    k = len(rows)
    width = 2 * m + 2 * k  # u, v, surplus, artificial
    tableau: list[list[Fraction]] = []
    for i, row in enumerate(rows):
        line = [Fraction(0)] * width
        for j, a in enumerate(row):
            line[j] = Fraction(a)
            line[m + j] = Fraction(-a)
        line[2 * m + i] = Fraction(-1)  # surplus
        line[2 * m + k + i] = Fraction(1)  # artificial
        tableau.append(line)
    rhs = [Fraction(margin)] * k
    cost = [Fraction(0)] * (2 * m + k) + [Fraction(1)] * k
    basis = list(range(2 * m + k, width))
    return _phase1_minimum(tableau, rhs, cost, basis) == 0
