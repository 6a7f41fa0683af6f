"""Exact two-phase simplex over the rationals.

Solves  max c.x  subject to  A x <= b,  x >= 0  with `Fraction` arithmetic and
Bland's anti-cycling rule, and returns an exact optimal dual vector alongside
the primal solution. Dual feasibility and strong duality are re-verified
before returning, so a result with status "optimal" carries a certified
optimality proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None
    dual: tuple[Fraction, ...] | None = None


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tableau[row][col]
    tableau[row] = [v / piv if v else v for v in tableau[row]]
    prow = tableau[row]
    nz = [j for j, v in enumerate(prow) if v]
    for r, trow in enumerate(tableau):
        if r != row and trow[col]:
            f = trow[col]
            for j in nz:
                trow[j] -= f * prow[j]
    basis[row] = col


def _price_out(
    tableau: list[list[Fraction]], basis: list[int], costs: list[Fraction], ncols: int
) -> None:
    obj = costs[:ncols] + [ZERO]
    for i, b in enumerate(basis):
        cb = costs[b]
        if cb:
            row = tableau[i]
            obj = [a - cb * v for a, v in zip(obj, row)]
    tableau.append(obj)


def _iterate(tableau: list[list[Fraction]], basis: list[int], allowed: list[bool]) -> str:
    m = len(tableau) - 1
    rhs = len(tableau[0]) - 1
    while True:
        obj = tableau[m]
        enter = next((j for j in range(rhs) if allowed[j] and obj[j] < 0), None)
        if enter is None:
            return "optimal"
        leave, best = None, None
        for i in range(m):
            coef = tableau[i][enter]
            if coef > 0:
                ratio = tableau[i][rhs] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            return "unbounded"
        _pivot(tableau, basis, leave, enter)


def solve_max(
    c: list[Fraction], rows: list[list[Fraction]], rhs: list[Fraction]
) -> SimplexResult:
    """Maximize c.x over A x <= b, x >= 0; exact, with a certified dual."""
    c = [Fraction(v) for v in c]
    rows = [[Fraction(v) for v in row] for row in rows]
    rhs = [Fraction(v) for v in rhs]
    m, n = len(rows), len(c)
    if any(len(row) != n for row in rows) or len(rhs) != m:
        raise ValueError("inconsistent LP dimensions")

    neg = [b < 0 for b in rhs]
    art_rows = [i for i in range(m) if neg[i]]
    n_art = len(art_rows)
    ncols = n + m + n_art  # structural, slack, artificial
    art_col = {r: n + m + k for k, r in enumerate(art_rows)}

    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    for i in range(m):
        sign = -1 if neg[i] else 1
        row = [sign * v for v in rows[i]] + [ZERO] * (m + n_art) + [sign * rhs[i]]
        row[n + i] = Fraction(sign)
        if neg[i]:
            row[art_col[i]] = ONE
            basis.append(art_col[i])
        else:
            basis.append(n + i)
        tableau.append(row)

    if n_art:
        costs1 = [ZERO] * (n + m) + [ONE] * n_art
        _price_out(tableau, basis, costs1, ncols)
        allowed = [True] * ncols
        status = _iterate(tableau, basis, allowed)
        if status != "optimal":
            raise AssertionError("phase 1 is always bounded")
        if tableau[-1][-1] != 0:
            return SimplexResult(status="infeasible")
        tableau.pop()
        # drive remaining artificials out of the basis; drop redundant rows
        for i in reversed(range(len(basis))):
            if basis[i] >= n + m:
                col = next((j for j in range(n + m) if tableau[i][j]), None)
                if col is None:
                    tableau.pop(i)
                    basis.pop(i)
                else:
                    _pivot(tableau, basis, i, col)

    costs2 = [-v for v in c] + [ZERO] * (m + n_art)
    _price_out(tableau, basis, costs2, ncols)
    allowed = [j < n + m for j in range(ncols)]
    status = _iterate(tableau, basis, allowed)
    if status != "optimal":
        return SimplexResult(status="unbounded")

    x = [ZERO] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tableau[i][-1]
    objective = tableau[-1][-1]  # the rhs cell holds -min(-c.x) = c.x
    dual = [tableau[-1][n + i] for i in range(m)]

    _verify(c, rows, rhs, x, objective, dual)
    return SimplexResult(
        status="optimal", x=tuple(x), objective=objective, dual=tuple(dual)
    )


def _verify(c, rows, rhs, x, objective, dual) -> None:
    if any(v < 0 for v in x):
        raise AssertionError("primal negativity")
    for row, b in zip(rows, rhs):
        if sum(a * v for a, v in zip(row, x)) > b:
            raise AssertionError("primal infeasibility")
    if any(y < 0 for y in dual):
        raise AssertionError("dual negativity")
    for j in range(len(c)):
        if sum(rows[i][j] * dual[i] for i in range(len(rows))) < c[j]:
            raise AssertionError("dual infeasibility")
    if sum(cv * xv for cv, xv in zip(c, x)) != objective:
        raise AssertionError("objective mismatch")
    if sum(b * y for b, y in zip(rhs, dual)) != objective:
        raise AssertionError("strong duality violated")
