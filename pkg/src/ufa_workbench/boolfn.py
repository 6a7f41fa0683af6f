"""Boolean and rational-valued functions on the hypercube, with exact width measures.

Conventions used throughout the package:

* variables are 0-based; variable 0 is the most significant bit of an input,
  so the word ``"10"`` on two variables assigns 1 to variable 0 and 0 to
  variable 1, and sits at table index ``int("10", 2) == 2``;
* a *word* is a ``str`` of ``'0'``/``'1'`` characters;
* a *subcube* is the satisfying set of a conjunction of literals, and its
  width is the number of fixed coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, ResourceLimitError

C1_SEARCH_BOUND = 12
UC1_EXACT_BOUND = 5  # exact disjoint-subcube partition search is doubly exponential


def word_of_index(index: int, arity: int) -> str:
    return format(index, f"0{arity}b") if arity else ""


def index_of_word(word: str) -> int:
    return int(word, 2) if word else 0


@dataclass(frozen=True)
class TruthTable:
    """A boolean function on `arity` variables, stored as 2**arity many 0/1 values."""

    arity: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be nonnegative")
        if len(self.values) != 1 << self.arity:
            raise ValueError(f"expected {1 << self.arity} values, got {len(self.values)}")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("truth table values must be 0 or 1")

    @classmethod
    def from_function(cls, arity: int, fn) -> "TruthTable":
        """Tabulate `fn`, called with a word per input."""
        return cls(arity, tuple(int(bool(fn(word_of_index(i, arity)))) for i in range(1 << arity)))

    def value(self, x: str | int) -> int:
        i = index_of_word(x) if isinstance(x, str) else x
        return self.values[i]

    def complement(self) -> "TruthTable":
        return TruthTable(self.arity, tuple(1 - v for v in self.values))

    def ones(self) -> list[int]:
        return [i for i, v in enumerate(self.values) if v]

    def ones_mask(self) -> int:
        """The 1-set as a bitmask over table indices."""
        m = 0
        for i, v in enumerate(self.values):
            if v:
                m |= 1 << i
        return m


def constant_table(arity: int, bit: int) -> TruthTable:
    return TruthTable(arity, (int(bool(bit)),) * (1 << arity))


def and_table(arity: int) -> TruthTable:
    return TruthTable(arity, tuple(int(i == (1 << arity) - 1) for i in range(1 << arity)))


def or_table(arity: int) -> TruthTable:
    return TruthTable(arity, tuple(int(i != 0) for i in range(1 << arity)))


def xor_table(arity: int) -> TruthTable:
    return TruthTable(arity, tuple(bin(i).count("1") & 1 for i in range(1 << arity)))


@dataclass(frozen=True)
class RealTable:
    """A function into the exact rationals on `arity` variables."""

    arity: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != 1 << self.arity:
            raise ValueError(f"expected {1 << self.arity} values, got {len(self.values)}")
        if any(not isinstance(v, Fraction) for v in self.values):
            object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    @classmethod
    def from_truth_table(cls, f: TruthTable) -> "RealTable":
        return cls(f.arity, tuple(Fraction(v) for v in f.values))

    def value(self, x: str | int) -> Fraction:
        i = index_of_word(x) if isinstance(x, str) else x
        return self.values[i]


def one_plus(f: TruthTable) -> RealTable:
    """The table of 1 + f."""
    return RealTable(f.arity, tuple(Fraction(1 + v) for v in f.values))


def two_minus(f: TruthTable) -> RealTable:
    """The table of 2 - f."""
    return RealTable(f.arity, tuple(Fraction(2 - v) for v in f.values))


@dataclass(frozen=True)
class Conjunction:
    """A conjunction of literals; `literals` maps each variable to its required bit.

    Stored as a sorted tuple of (variable, positive) pairs. The empty
    conjunction is the constant-1 function. Width is the number of literals.
    """

    literals: tuple[tuple[int, bool], ...]

    def __post_init__(self):
        lits = tuple(sorted((int(v), bool(p)) for v, p in self.literals))
        vars_seen = [v for v, _ in lits]
        if len(set(vars_seen)) != len(vars_seen):
            raise ValueError("a variable may appear with only one polarity")
        if any(v < 0 for v in vars_seen):
            raise ValueError("variable indices must be nonnegative")
        object.__setattr__(self, "literals", lits)

    @classmethod
    def of(cls, *literals: tuple[int, bool]) -> "Conjunction":
        return cls(tuple(literals))

    @property
    def width(self) -> int:
        return len(self.literals)

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.literals)

    def value_at(self, index: int, arity: int) -> int:
        for v, positive in self.literals:
            if ((index >> (arity - 1 - v)) & 1) != int(positive):
                return 0
        return 1

    def matches(self, word: str) -> bool:
        return all(word[v] == ("1" if positive else "0") for v, positive in self.literals)

    def consistent_with(self, other: "Conjunction") -> bool:
        """True iff some input satisfies both conjunctions."""
        required = dict(self.literals)
        return all(required.get(v, p) == p for v, p in other.literals)

    def conjoin(self, other: "Conjunction") -> "Conjunction | None":
        """The conjunction of both, or None when they contradict."""
        if not self.consistent_with(other):
            return None
        merged = dict(self.literals)
        merged.update(other.literals)
        return Conjunction(tuple(merged.items()))

    def shift(self, offset: int) -> "Conjunction":
        return Conjunction(tuple((v + offset, p) for v, p in self.literals))

    def satisfying_mask(self, arity: int) -> int:
        """Bitmask over table indices of the inputs satisfying the conjunction."""
        mask = 0
        free = [v for v in range(arity) if v not in dict(self.literals)]
        base = 0
        for v, positive in self.literals:
            if positive:
                base |= 1 << (arity - 1 - v)
        for bits in range(1 << len(free)):
            idx = base
            for j, v in enumerate(free):
                if (bits >> j) & 1:
                    idx |= 1 << (arity - 1 - v)
            mask |= 1 << idx
        return mask


def all_conjunctions(arity: int, max_width: int) -> list[Conjunction]:
    """Every conjunction of width at most `max_width`, by width then variable order."""
    out = []
    for w in range(min(max_width, arity) + 1):
        for vars_ in itertools.combinations(range(arity), w):
            for signs in itertools.product((False, True), repeat=w):
                out.append(Conjunction(tuple(zip(vars_, signs))))
    return out


@dataclass(frozen=True)
class DnfFormula:
    """A disjunction of conjunctions on `arity` variables."""

    arity: int
    terms: tuple[Conjunction, ...]

    def __post_init__(self):
        for t in self.terms:
            if any(v >= self.arity for v in t.variables()):
                raise ValueError("term uses a variable outside the arity")

    @property
    def width(self) -> int:
        return max((t.width for t in self.terms), default=0)

    def dedup(self) -> "DnfFormula":
        seen, out = set(), []
        for t in self.terms:
            if t not in seen:
                seen.add(t)
                out.append(t)
        return DnfFormula(self.arity, tuple(out))

    def truth_table(self) -> TruthTable:
        vals = [0] * (1 << self.arity)
        for t in self.terms:
            m = t.satisfying_mask(self.arity)
            i = 0
            while m:
                if m & 1:
                    vals[i] = 1
                m >>= 1
                i += 1
        return TruthTable(self.arity, tuple(vals))


def eval_dnf(formula: DnfFormula, word: str) -> bool:
    if len(word) != formula.arity:
        raise PreconditionError(
            f"input has {len(word)} bits but the formula has arity {formula.arity}"
        )
    return any(t.matches(word) for t in formula.terms)


def is_unambiguous_dnf(formula: DnfFormula) -> bool:
    """True iff no input satisfies two terms.

    Two terms overlap exactly when their literal union is contradiction-free,
    so a pairwise consistency check suffices; no 2**n enumeration.
    """
    terms = formula.terms
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if terms[i].consistent_with(terms[j]):
                return False
    return True


@dataclass(frozen=True)
class CnfFormula:
    """A conjunction of clauses; each clause is a disjunction of literals."""

    arity: int
    clauses: tuple[tuple[tuple[int, bool], ...], ...]

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def value(self, word: str) -> bool:
        return all(
            any(word[v] == ("1" if p else "0") for v, p in clause) for clause in self.clauses
        )

    def truth_table(self) -> TruthTable:
        return TruthTable.from_function(self.arity, self.value)


def _subcube_inside(f: TruthTable, point: int, fixed: tuple[int, ...]) -> bool:
    """Is the subcube through `point` with coordinates `fixed` held inside f^-1(1)?"""
    free = [v for v in range(f.arity) if v not in fixed]
    for bits in range(1 << len(free)):
        idx = point
        for j, v in enumerate(free):
            pos = f.arity - 1 - v
            idx = (idx & ~(1 << pos)) | (((bits >> j) & 1) << pos)
        if not f.values[idx]:
            return False
    return True


def certificate_width_at(f: TruthTable, point: int) -> int:
    """Width of the smallest subcube through `point` contained in f^-1(b), b = f(point).

    Subcubes are scanned by increasing co-dimension with lexicographic
    tie-breaking, so the result and search order are deterministic.
    """
    g = f if f.values[point] else f.complement()
    for k in range(f.arity + 1):
        for fixed in itertools.combinations(range(f.arity), k):
            if _subcube_inside(g, point, fixed):
                return k
    raise AssertionError("the full fixing always certifies")


def c1_width(f: TruthTable, *, search_bound: int = C1_SEARCH_BOUND) -> int:
    """Least k such that f is a k-DNF: the worst certificate width over 1-inputs."""
    if f.arity > search_bound:
        raise ResourceLimitError(f"arity {f.arity} exceeds the exhaustive bound {search_bound}")
    return max((certificate_width_at(f, x) for x in f.ones()), default=0)


def c0_width(f: TruthTable, *, search_bound: int = C1_SEARCH_BOUND) -> int:
    """Least k such that f is a k-CNF: the worst certificate width over 0-inputs."""
    if f.arity > search_bound:
        raise ResourceLimitError(f"arity {f.arity} exceeds the exhaustive bound {search_bound}")
    return max(
        (certificate_width_at(f, x) for x in range(1 << f.arity) if not f.values[x]),
        default=0,
    )


@dataclass(frozen=True)
class WidthBound:
    """A width value together with whether it is exact or only an upper bound."""

    value: int
    exact: bool


def _subcubes_inside(f: TruthTable, max_width: int) -> list[tuple[Conjunction, int]]:
    ones = f.ones_mask()
    out = []
    for c in all_conjunctions(f.arity, max_width):
        m = c.satisfying_mask(f.arity)
        if m & ~ones == 0:
            out.append((c, m))
    return out


def _exact_partition_exists(ones: int, pieces: list[int]) -> bool:
    """Can `ones` be written as a disjoint union of the given piece masks?"""
    # index pieces by every point they contain, for first-uncovered branching
    by_point: dict[int, list[int]] = {}
    for m in pieces:
        mm = m
        while mm:
            p = (mm & -mm).bit_length() - 1
            by_point.setdefault(p, []).append(m)
            mm &= mm - 1

    failed: set[int] = set()

    def solve(rest: int) -> bool:
        if rest == 0:
            return True
        if rest in failed:
            return False
        p = (rest & -rest).bit_length() - 1
        for m in by_point.get(p, ()):
            if m & ~rest == 0 and solve(rest & ~m):
                return True
        failed.add(rest)
        return False

    return solve(ones)


def uc1_width(f: TruthTable, *, exact_bound: int = UC1_EXACT_BOUND) -> WidthBound:
    """Least k such that f^-1(1) partitions into width-<=k subcubes inside f^-1(1).

    Exact via exact-cover search for arity <= `exact_bound`; beyond that a
    greedy disjoint cover gives an upper bound flagged `exact=False`.
    """
    ones = f.ones_mask()
    if ones == 0:
        return WidthBound(0, True)
    if f.arity <= exact_bound:
        lower = c1_width(f)
        for k in range(lower, f.arity + 1):
            pieces = [m for _, m in _subcubes_inside(f, k)]
            if _exact_partition_exists(ones, pieces):
                return WidthBound(k, True)
        raise AssertionError("singleton subcubes always partition the 1-set")
    # greedy: cover the least uncovered point with the widest-dimension cube
    # inside f^-1(1) that avoids covered points
    covered = 0
    worst = 0
    while covered != ones:
        rest = ones & ~covered
        point = (rest & -rest).bit_length() - 1
        best_mask, best_width = 1 << point, f.arity
        for k in range(f.arity):
            found = False
            for fixed in itertools.combinations(range(f.arity), k):
                c = Conjunction(
                    tuple((v, bool((point >> (f.arity - 1 - v)) & 1)) for v in fixed)
                )
                m = c.satisfying_mask(f.arity)
                if m & ~ones == 0 and m & covered == 0:
                    best_mask, best_width, found = m, k, True
                    break
            if found:
                break
        covered |= best_mask
        worst = max(worst, best_width)
    return WidthBound(worst, False)


def or_compose_fn(f: TruthTable) -> TruthTable:
    """The 2n-variable table (x, y) -> f(x) or f(y), with x the high-order block."""
    n = f.arity
    size = 1 << n
    vals = tuple(
        f.values[x] | f.values[y] for x in range(size) for y in range(size)
    )
    return TruthTable(2 * n, vals)
