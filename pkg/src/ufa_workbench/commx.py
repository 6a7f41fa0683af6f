"""Communication matrices and their measures.

Covers, partitions, rational rank, and nonnegative-rank bounds, all exact.
Cover and partition searches collapse duplicate rows and columns first (the
measures are invariant under duplication), enumerate candidate rectangles
deterministically, and return witnesses in original coordinates. Searches
that would exceed their size bounds degrade to explicit (lower, upper)
windows flagged inexact instead of raising.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import PreconditionError, ResourceLimitError

COLLAPSE_BOUND = 64  # per side, after duplicate row/column collapse
NMF_ITERATIONS = 10_000
NMF_SEED = 0


@dataclass(frozen=True)
class Rectangle:
    """A combinatorial rectangle: a set of row indices times a set of column indices."""

    rows: frozenset[int]
    cols: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "rows", frozenset(self.rows))
        object.__setattr__(self, "cols", frozenset(self.cols))

    def sort_key(self) -> tuple:
        return (tuple(sorted(self.rows)), tuple(sorted(self.cols)))

    def contains(self, i: int, j: int) -> bool:
        return i in self.rows and j in self.cols


@dataclass(frozen=True)
class CommMatrix:
    """A labeled matrix of exact rationals; boolean matrices are the 0/1 case."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != len(self.row_labels):
            raise ValueError("row count does not match row labels")
        if any(len(r) != len(self.col_labels) for r in self.entries):
            raise ValueError("matrix is not rectangular")
        object.__setattr__(
            self, "entries", tuple(tuple(Fraction(v) for v in row) for row in self.entries)
        )

    @classmethod
    def from_rows(cls, rows, row_labels=None, col_labels=None) -> "CommMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if row_labels is None:
            row_labels = tuple(str(i) for i in range(len(rows)))
        if col_labels is None:
            col_labels = tuple(str(j) for j in range(ncols))
        return cls(tuple(row_labels), tuple(col_labels), tuple(tuple(r) for r in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.row_labels), len(self.col_labels))

    @property
    def is_boolean(self) -> bool:
        return all(v in (0, 1) for row in self.entries for v in row)

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i][j]


def identity_matrix(n: int) -> CommMatrix:
    return CommMatrix.from_rows([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])


def ones_matrix(nrows: int, ncols: int) -> CommMatrix:
    return CommMatrix.from_rows([[Fraction(1)] * ncols for _ in range(nrows)])


def complement_identity_matrix(n: int) -> CommMatrix:
    return CommMatrix.from_rows([[Fraction(int(i != j)) for j in range(n)] for i in range(n)])


def matrix_of_language(view, split: tuple[int, int], *, cell_bound: int = 1 << 16) -> CommMatrix:
    """The boolean matrix of a fixed-length language under an (m1, m2) input split."""
    m1, m2 = split
    if m1 + m2 != view.length:
        raise PreconditionError(f"split {split} does not sum to word length {view.length}")
    if (1 << (m1 + m2)) > cell_bound:
        raise ResourceLimitError(f"matrix would have {1 << (m1 + m2)} cells")
    words = view.words()
    row_labels = tuple(format(i, f"0{m1}b") if m1 else "" for i in range(1 << m1))
    col_labels = tuple(format(j, f"0{m2}b") if m2 else "" for j in range(1 << m2))
    entries = tuple(
        tuple(Fraction(int(x + y in words)) for y in col_labels) for x in row_labels
    )
    return CommMatrix(row_labels, col_labels, entries)


@dataclass(frozen=True)
class CoverResult:
    """Cover or partition size with witness; `exact` is False for bound-only results."""

    lower: int
    upper: int
    rectangles: tuple[Rectangle, ...]
    exact: bool

    @property
    def count(self) -> int:
        if not self.exact:
            raise ValueError("result is a bound window, not an exact count")
        return self.upper


def _collapse(M: CommMatrix, b: Fraction):
    """Group duplicate rows/cols; return per-group representatives and member lists."""
    row_groups: dict[tuple, list[int]] = {}
    for i, row in enumerate(M.entries):
        row_groups.setdefault(row, []).append(i)
    rows = sorted(row_groups.values(), key=lambda g: g[0])
    cols_t = list(zip(*M.entries)) if M.entries else []
    col_groups: dict[tuple, list[int]] = {}
    for j, col in enumerate(cols_t):
        col_groups.setdefault(col, []).append(j)
    cols = sorted(col_groups.values(), key=lambda g: g[0])
    target = [
        [int(M.entries[gr[0]][gc[0]] == b) for gc in cols] for gr in rows
    ]
    return target, rows, cols


def _expand(rect_rows, rect_cols, rows, cols) -> Rectangle:
    return Rectangle(
        frozenset(i for g in rect_rows for i in rows[g]),
        frozenset(j for g in rect_cols for j in cols[g]),
    )


def _maximal_rectangles(target: list[list[int]]) -> list[tuple[int, int]]:
    """All maximal all-ones rectangles of a 0/1 matrix, as (rowmask, colmask)."""
    ncols = len(target[0]) if target else 0
    row_masks = []
    for row in target:
        m = 0
        for j, v in enumerate(row):
            if v:
                m |= 1 << j
        row_masks.append(m)
    closure: set[int] = set()
    for m in row_masks:
        if m:
            new = {m} | {m & c for c in closure}
            closure |= {v for v in new if v}
    out = []
    for colmask in closure:
        rowmask = 0
        for i, m in enumerate(row_masks):
            if m & colmask == colmask:
                rowmask |= 1 << i
        out.append((rowmask, colmask))
    out.sort()
    return out


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask &= mask - 1


def _cells_mask(rowmask: int, colmask: int, ncols: int) -> int:
    m = 0
    for i in _bits(rowmask):
        m |= colmask << (i * ncols)
    return m


def cover_number(
    M: CommMatrix, b: int, *, collapse_bound: int = COLLAPSE_BOUND
) -> CoverResult:
    """Least number of b-monochromatic rectangles covering the b-entries, with witness.

    Exact via maximal-rectangle enumeration plus branch-and-bound set cover;
    beyond the collapse bound a greedy witness is returned flagged inexact.
    """
    bf = Fraction(b)
    target, rows, cols = _collapse(M, bf)
    nr, nc = len(target), len(target[0]) if target else 0
    universe = 0
    for i in range(nr):
        for j in range(nc):
            if target[i][j]:
                universe |= 1 << (i * nc + j)
    if universe == 0:
        return CoverResult(0, 0, (), True)

    rects = _maximal_rectangles(target)
    cellmasks = [_cells_mask(rm, cm, nc) for rm, cm in rects]
    witness_idx, covered = [], 0
    while covered != universe:
        best_i = max(
            range(len(rects)),
            key=lambda i: (bin(cellmasks[i] & ~covered).count("1"), -i),
        )
        witness_idx.append(best_i)
        covered |= cellmasks[best_i]
    greedy = list(witness_idx)

    exact_ok = nr <= collapse_bound and nc <= collapse_bound
    if exact_ok:
        per_cell: dict[int, list[int]] = {}
        for cell in _bits(universe):
            per_cell[cell] = [i for i, cm in enumerate(cellmasks) if (cm >> cell) & 1]
        max_size = max(bin(cm).count("1") for cm in cellmasks)
        best = greedy

        def dfs(uncovered: int, chosen: list[int]):
            nonlocal best
            if uncovered == 0:
                if len(chosen) < len(best):
                    best = list(chosen)
                return
            need = (bin(uncovered).count("1") + max_size - 1) // max_size
            if len(chosen) + max(need, 1) >= len(best):
                return
            cell = min(_bits(uncovered), key=lambda c: (len(per_cell[c]), c))
            for i in per_cell[cell]:
                chosen.append(i)
                dfs(uncovered & ~cellmasks[i], chosen)
                chosen.pop()

        dfs(universe, [])
        witness_idx = best

    witness = tuple(
        sorted(
            (
                _expand(list(_bits(rects[i][0])), list(_bits(rects[i][1])), rows, cols)
                for i in witness_idx
            ),
            key=Rectangle.sort_key,
        )
    )
    k = len(witness_idx)
    return CoverResult(k if exact_ok else 1, k, witness, exact_ok)


def partition_number(
    M: CommMatrix, *, collapse_bound: int = COLLAPSE_BOUND
) -> CoverResult:
    """Least number of pairwise disjoint 1-rectangles covering the 1-entries.

    Branch-and-bound exact-cover search on the collapsed matrix, seeded with
    the one-piece-per-row partition and bounded below by the rational rank.
    """
    target, rows, cols = _collapse(M, Fraction(1))
    nr, nc = len(target), len(target[0]) if target else 0
    universe = 0
    for i in range(nr):
        for j in range(nc):
            if target[i][j]:
                universe |= 1 << (i * nc + j)
    if universe == 0:
        return CoverResult(0, 0, (), True)

    row_piece = []
    for i in range(nr):
        colmask = sum(1 << j for j in range(nc) if target[i][j])
        if colmask:
            row_piece.append((1 << i, colmask))
    rank_lower = rational_rank(
        CommMatrix.from_rows([[Fraction(v) for v in row] for row in target])
    )

    if not (nr <= collapse_bound and nc <= collapse_bound):
        witness = tuple(
            sorted(
                (_expand(list(_bits(rm)), list(_bits(cm)), rows, cols) for rm, cm in row_piece),
                key=Rectangle.sort_key,
            )
        )
        return CoverResult(rank_lower, len(row_piece), witness, False)

    row_masks = [sum(1 << j for j in range(nc) if target[i][j]) for i in range(nr)]
    best: list[tuple[int, int]] = row_piece
    failed_budget: dict[int, int] = {}

    def dfs(rest: int, chosen: list[tuple[int, int]]):
        nonlocal best
        if rest == 0:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        budget = len(best) - 1 - len(chosen)  # pieces still spendable
        if budget <= 0 or budget <= failed_budget.get(rest, -1):
            return
        cell = next(_bits(rest))
        r, c = divmod(cell, nc)
        avail_cols = 0
        for j in _bits(row_masks[r]):
            if (rest >> (r * nc + j)) & 1:
                avail_cols |= 1 << j
        others = avail_cols & ~(1 << c)
        other_cols = list(_bits(others))
        before = best
        for sub in range(1 << len(other_cols)):
            colmask = 1 << c
            for t, j in enumerate(other_cols):
                if (sub >> t) & 1:
                    colmask |= 1 << j
            rmax = 0
            for i in range(nr):
                if row_masks[i] & colmask == colmask:
                    ok = True
                    for j in _bits(colmask):
                        if not (rest >> (i * nc + j)) & 1:
                            ok = False
                            break
                    if ok:
                        rmax |= 1 << i
            extra_rows = list(_bits(rmax & ~(1 << r)))
            for rsub in range(1 << len(extra_rows)):
                rowmask = 1 << r
                for t, i in enumerate(extra_rows):
                    if (rsub >> t) & 1:
                        rowmask |= 1 << i
                piece = _cells_mask(rowmask, colmask, nc)
                chosen.append((rowmask, colmask))
                dfs(rest & ~piece, chosen)
                chosen.pop()
        if best is before:
            failed_budget[rest] = max(failed_budget.get(rest, -1), budget)

    if len(best) > rank_lower:
        dfs(universe, [])
    witness = tuple(
        sorted(
            (_expand(list(_bits(rm)), list(_bits(cm)), rows, cols) for rm, cm in best),
            key=Rectangle.sort_key,
        )
    )
    return CoverResult(len(best), len(best), witness, True)


def rational_rank(M: CommMatrix) -> int:
    """Exact rank over the rationals by fraction-free (Bareiss) elimination."""
    rows = []
    for row in M.entries:
        denom = 1
        for v in row:
            denom = denom * v.denominator // gcd(denom, v.denominator)
        rows.append([int(v * denom) for v in row])
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    rank, prev, r = 0, 1, 0
    for c in range(nc):
        pivot = next((i for i in range(r, nr) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                rows[i][j] = (rows[i][j] * rows[r][c] - rows[i][c] * rows[r][j]) // prev
            rows[i][c] = 0
        prev = rows[r][c]
        rank += 1
        r += 1
        if r == nr:
            break
    return rank


@dataclass(frozen=True)
class NonnegFactorization:
    """A sum of nonnegative rank-1 terms u v^T reconstructing a matrix exactly or nearly."""

    factors: tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...]], ...]

    def __post_init__(self):
        clean = []
        for u, v in self.factors:
            u = tuple(Fraction(x) for x in u)
            v = tuple(Fraction(x) for x in v)
            if any(x < 0 for x in u) or any(x < 0 for x in v):
                raise ValueError("factors must be nonnegative")
            clean.append((u, v))
        object.__setattr__(self, "factors", tuple(clean))

    @property
    def size(self) -> int:
        return len(self.factors)

    def reconstruct(self) -> tuple[tuple[Fraction, ...], ...]:
        if not self.factors:
            return ()
        nr, nc = len(self.factors[0][0]), len(self.factors[0][1])
        out = [[Fraction(0)] * nc for _ in range(nr)]
        for u, v in self.factors:
            for i in range(nr):
                if u[i]:
                    for j in range(nc):
                        out[i][j] += u[i] * v[j]
        return tuple(tuple(row) for row in out)


def _check_nonneg(M: CommMatrix) -> None:
    if any(v < 0 for row in M.entries for v in row):
        raise PreconditionError("matrix has a negative entry")


def _max_abs_error(M: CommMatrix, recon) -> Fraction:
    nr, nc = M.shape
    if not recon:
        recon = tuple((Fraction(0),) * nc for _ in range(nr))
    return max(
        (abs(M.entries[i][j] - recon[i][j]) for i in range(nr) for j in range(nc)),
        default=Fraction(0),
    )


def factorization_from_partition(M: CommMatrix, rectangles) -> NonnegFactorization:
    """Indicator rank-1 terms, one per rectangle of a disjoint 1-cover of a boolean matrix."""
    nr, nc = M.shape
    factors = []
    for rect in rectangles:
        u = tuple(Fraction(int(i in rect.rows)) for i in range(nr))
        v = tuple(Fraction(int(j in rect.cols)) for j in range(nc))
        factors.append((u, v))
    return NonnegFactorization(tuple(factors))


def _trivial_row_factorization(M: CommMatrix) -> NonnegFactorization:
    nr, nc = M.shape
    factors = []
    for i, row in enumerate(M.entries):
        if any(row):
            u = tuple(Fraction(int(t == i)) for t in range(nr))
            factors.append((u, row))
    return NonnegFactorization(tuple(factors))


@dataclass(frozen=True)
class NonnegRankWindow:
    lower: int
    upper: int
    witness: NonnegFactorization


def nonneg_rank_bounds(M: CommMatrix) -> NonnegRankWindow:
    """A certified (lower, upper) window for the nonnegative rank.

    Lower bound: rational rank. Upper bound: the best exactly-verified witness
    among the one-term-per-row factorization, the partition-derived
    factorization for boolean matrices, and a seeded multiplicative-update
    search accepted only when its rationalization reconstructs M exactly.
    """
    _check_nonneg(M)
    lower = rational_rank(M)
    witness = _trivial_row_factorization(M)
    if M.is_boolean:
        part = partition_number(M)
        if part.exact and part.upper < witness.size:
            witness = factorization_from_partition(M, part.rectangles)
    if lower < witness.size:
        nmf = _nmf_factorization(M, lower, NMF_SEED, NMF_ITERATIONS, rationalize=True)
        if nmf is not None and _max_abs_error(M, nmf.reconstruct()) == 0:
            witness = nmf
    if _max_abs_error(M, witness.reconstruct()) != 0:
        raise AssertionError("upper-bound witness must reconstruct M exactly")
    return NonnegRankWindow(lower, witness.size, witness)


def _nmf_factorization(
    M: CommMatrix, r: int, seed: int, iterations: int, *, rationalize: bool
) -> NonnegFactorization | None:
    """Frobenius multiplicative updates from a seeded start; exactness not guaranteed."""
    nr, nc = M.shape
    if r <= 0 or nr == 0 or nc == 0:
        return None
    X = np.array([[float(v) for v in row] for row in M.entries])
    rng = np.random.default_rng(seed)
    scale = np.sqrt(max(X.mean(), 1e-9) / r)
    W = np.abs(rng.standard_normal((nr, r))) * scale
    H = np.abs(rng.standard_normal((r, nc))) * scale
    eps = 1e-12
    for _ in range(iterations):
        H *= (W.T @ X) / np.maximum(W.T @ W @ H, eps)
        W *= (X @ H.T) / np.maximum(W @ H @ H.T, eps)
    factors = []
    for t in range(r):
        if rationalize:
            u = tuple(Fraction(x).limit_denominator(10**6) for x in W[:, t])
            v = tuple(Fraction(x).limit_denominator(10**6) for x in H[t, :])
        else:
            u = tuple(Fraction(float(x)) for x in W[:, t])
            v = tuple(Fraction(float(x)) for x in H[t, :])
        u = tuple(max(x, Fraction(0)) for x in u)
        v = tuple(max(x, Fraction(0)) for x in v)
        factors.append((u, v))
    return NonnegFactorization(tuple(factors))


def approx_nonneg_rank_upper(
    M: CommMatrix,
    eps: Fraction,
    r: int,
    *,
    seed: int = NMF_SEED,
    iterations: int = NMF_ITERATIONS,
) -> NonnegFactorization | None:
    """Search for a nonnegative factorization of size <= r within entrywise error eps.

    A returned witness is verified in exact arithmetic, so success soundly
    certifies the bound; failure certifies nothing.
    """
    _check_nonneg(M)
    eps = Fraction(eps)
    if eps < 0:
        raise PreconditionError("eps must be nonnegative")
    nr, nc = M.shape
    candidates: list[NonnegFactorization] = []
    if r >= min(nr, nc):
        candidates.append(_trivial_row_factorization(M))
    flat = [v for row in M.entries for v in row]
    if flat and r >= 1:
        mid = (max(flat) + min(flat)) / 2
        candidates.append(
            NonnegFactorization((((mid,) * nr, (Fraction(1),) * nc),))
        )
    if M.is_boolean and eps >= Fraction(1, 4) and r >= 2:
        part = partition_number(M)
        if part.exact and part.upper + 1 <= r:
            base = factorization_from_partition(M, part.rectangles)
            shifted = [(tuple(Fraction(1, 2) * x for x in u), v) for u, v in base.factors]
            shifted.append(((Fraction(1, 4),) * nr, (Fraction(1),) * nc))
            candidates.append(NonnegFactorization(tuple(shifted)))
    nmf = _nmf_factorization(M, r, seed, iterations, rationalize=True)
    if nmf is not None:
        candidates.append(nmf)
    nmf_raw = _nmf_factorization(M, r, seed, iterations, rationalize=False)
    if nmf_raw is not None:
        candidates.append(nmf_raw)
    for cand in candidates:
        if cand.size <= r and _max_abs_error(M, cand.reconstruct()) <= eps:
            return cand
    return None


def or_matrix(F: CommMatrix) -> CommMatrix:
    """The OR of two independent copies: entry ((x,x'),(y,y')) = F(x,y) or F(x',y').

    Row index (x, x') has x in the high-order position; labels concatenate.
    """
    if not F.is_boolean:
        raise PreconditionError("or_matrix requires a boolean matrix")
    nr, nc = F.shape
    row_labels = tuple(a + b for a in F.row_labels for b in F.row_labels)
    col_labels = tuple(a + b for a in F.col_labels for b in F.col_labels)
    entries = tuple(
        tuple(
            Fraction(int(bool(F.entries[x][y]) or bool(F.entries[xp][yp])))
            for y in range(nc)
            for yp in range(nc)
        )
        for x in range(nr)
        for xp in range(nr)
    )
    return CommMatrix(row_labels, col_labels, entries)


def approx_or_matrix(
    F: CommMatrix, factorization: NonnegFactorization
) -> tuple[CommMatrix, NonnegFactorization]:
    """The shifted-average matrix G((x,x'),(y,y')) = (F(x,y)+F(x',y'))/2 + 1/4.

    G approximates or_matrix(F) to entrywise error exactly 1/4, and the
    returned witness has 2r+1 factors built from two half-weighted padded
    copies of the given exact factorization of F plus a constant term.
    """
    if not F.is_boolean:
        raise PreconditionError("approx_or_matrix requires a boolean matrix")
    if _max_abs_error(F, factorization.reconstruct()) != 0:
        raise PreconditionError("factorization does not reconstruct F exactly")
    nr, nc = F.shape
    row_labels = tuple(a + b for a in F.row_labels for b in F.row_labels)
    col_labels = tuple(a + b for a in F.col_labels for b in F.col_labels)
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    entries = tuple(
        tuple(
            (F.entries[x][y] + F.entries[xp][yp]) * half + quarter
            for y in range(nc)
            for yp in range(nc)
        )
        for x in range(nr)
        for xp in range(nr)
    )
    G = CommMatrix(row_labels, col_labels, entries)

    ones_r, ones_c = (Fraction(1),) * nr, (Fraction(1),) * nc
    factors = []
    for u, v in factorization.factors:
        hi_u = tuple(half * u[x] for x in range(nr) for _ in range(nr))
        hi_v = tuple(v[y] for y in range(nc) for _ in range(nc))
        factors.append((hi_u, hi_v))
        lo_u = tuple(half * u[xp] for _ in range(nr) for xp in range(nr))
        lo_v = tuple(v[yp] for _ in range(nc) for yp in range(nc))
        factors.append((lo_u, lo_v))
    factors.append(
        (tuple(quarter for _ in range(nr * nr)), tuple(Fraction(1) for _ in range(nc * nc)))
    )
    witness = NonnegFactorization(tuple(factors))
    if witness.reconstruct() != G.entries:
        raise AssertionError("witness must reconstruct G exactly")
    return G, witness
