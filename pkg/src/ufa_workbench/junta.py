"""Conical juntas, the approximate-nonnegative-degree LP, and certificate transforms.

A conical junta is a nonnegative combination of conjunctions; its degree is
the largest conjunction width used. `approx_nonneg_degree_lp` computes, for a
rational-valued table f and a degree budget d, the least pointwise error
achievable by a degree-<=d conical junta, together with an optimal junta and
an exactly-feasible dual certificate achieving the same value. Everything is
exact rational arithmetic; every returned optimum is certified on both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .boolfn import (
    Conjunction,
    DnfFormula,
    RealTable,
    TruthTable,
    all_conjunctions,
    index_of_word,
    is_unambiguous_dnf,
)
from .errors import PreconditionError, ResourceLimitError
from . import simplex

LP_ARITY_BOUND = 8


def _combine_terms(terms) -> tuple[tuple[Fraction, Conjunction], ...]:
    acc: dict[Conjunction, Fraction] = {}
    for w, c in terms:
        if w:
            acc[c] = acc.get(c, Fraction(0)) + Fraction(w)
    items = [(w, c) for c, w in acc.items() if w]
    items.sort(key=lambda t: (t[1].width, t[1].literals))
    return tuple(items)


@dataclass(frozen=True)
class ConicalJunta:
    """A nonnegative combination of conjunctions: sum of weight * conjunction."""

    arity: int
    terms: tuple[tuple[Fraction, Conjunction], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", _combine_terms(self.terms))
        if any(w < 0 for w, _ in self.terms):
            raise ValueError("junta weights must be nonnegative")
        for _, c in self.terms:
            if any(v >= self.arity for v in c.variables()):
                raise ValueError("term uses a variable outside the arity")

    @property
    def degree(self) -> int:
        return max((c.width for _, c in self.terms), default=0)

    def value(self, x: str | int) -> Fraction:
        i = index_of_word(x) if isinstance(x, str) else x
        return sum((w for w, c in self.terms if c.value_at(i, self.arity)), Fraction(0))

    def table(self) -> RealTable:
        return RealTable(self.arity, tuple(self.value(i) for i in range(1 << self.arity)))

    def scale(self, factor: Fraction) -> "ConicalJunta":
        factor = Fraction(factor)
        return ConicalJunta(self.arity, tuple((w * factor, c) for w, c in self.terms))

    def add(self, other: "ConicalJunta") -> "ConicalJunta":
        if other.arity != self.arity:
            raise PreconditionError("junta arities differ")
        return ConicalJunta(self.arity, self.terms + other.terms)

    def plus_constant(self, constant: Fraction) -> "ConicalJunta":
        return ConicalJunta(self.arity, self.terms + ((Fraction(constant), Conjunction(())),))

    def times(self, other: "ConicalJunta") -> "ConicalJunta":
        """The product, expanded term by term; contradictory products vanish."""
        if other.arity != self.arity:
            raise PreconditionError("junta arities differ")
        out = []
        for w1, c1 in self.terms:
            for w2, c2 in other.terms:
                merged = c1.conjoin(c2)
                if merged is not None:
                    out.append((w1 * w2, merged))
        return ConicalJunta(self.arity, tuple(out))


def eval_junta(h: ConicalJunta, word: str) -> Fraction:
    if len(word) != h.arity:
        raise PreconditionError(f"input has {len(word)} bits but the junta has arity {h.arity}")
    return h.value(word)


def junta_from_unambiguous_dnf(formula: DnfFormula) -> ConicalJunta:
    """The 0/1-coefficient junta of an unambiguous DNF; it equals the DNF pointwise."""
    if not is_unambiguous_dnf(formula):
        raise PreconditionError("the DNF is ambiguous; its terms do not sum to its value")
    return ConicalJunta(formula.arity, tuple((Fraction(1), t) for t in formula.terms))


@dataclass(frozen=True)
class DualCertificate:
    """A signed table Phi with a degree parameter d.

    Feasibility (norm at most 1 and nonpositive correlation with every
    width-<=d conjunction) is checked by `verify_dual_certificate`, never
    assumed.
    """

    arity: int
    degree: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != 1 << self.arity:
            raise ValueError(f"expected {1 << self.arity} values, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def norm(self) -> Fraction:
        return sum((abs(v) for v in self.values), Fraction(0))

    def inner_table(self, f: RealTable) -> Fraction:
        if f.arity != self.arity:
            raise PreconditionError("arities differ")
        return sum((p * v for p, v in zip(self.values, f.values)), Fraction(0))

    def inner_conjunction(self, c: Conjunction) -> Fraction:
        mask = c.satisfying_mask(self.arity)
        total = Fraction(0)
        i = 0
        while mask:
            if mask & 1:
                total += self.values[i]
            mask >>= 1
            i += 1
        return total


@dataclass(frozen=True)
class LpResult:
    """Output of the degree-d error LP: the exact optimum and both witnesses."""

    optimum: Fraction
    primal: ConicalJunta
    dual: DualCertificate
    status: str = "optimal"


def approx_nonneg_degree_lp(
    f: RealTable, d: int, *, arity_bound: int = LP_ARITY_BOUND
) -> LpResult:
    """Least pointwise error of a degree-<=d conical junta approximating f.

    Returns the exact optimum epsilon*, an optimal junta, and a feasible dual
    certificate with correlation exactly epsilon*; primal and dual objectives
    are asserted equal. Degrees above the arity behave like d = arity.
    """
    n = f.arity
    if n > arity_bound:
        raise ResourceLimitError(f"LP arity {n} exceeds bound {arity_bound}")
    d = min(d, n)
    conjs = all_conjunctions(n, d)
    npoints = 1 << n
    masks = [c.satisfying_mask(n) for c in conjs]
    ncols = len(conjs) + 1  # weights, then epsilon

    rows, rhs = [], []
    for x in range(npoints):
        coefs = [Fraction((m >> x) & 1) for m in masks]
        rows.append(coefs + [Fraction(-1)])
        rhs.append(f.values[x])
        rows.append([-v for v in coefs] + [Fraction(-1)])
        rhs.append(-f.values[x])
    c_vec = [Fraction(0)] * len(conjs) + [Fraction(-1)]

    res = simplex.solve_max(c_vec, rows, rhs)
    if res.status != "optimal":
        raise AssertionError("the degree LP is always feasible and bounded")
    optimum = -res.objective
    primal = ConicalJunta(n, tuple((w, c) for w, c in zip(res.x, conjs) if w))
    phi_values = [res.dual[2 * x + 1] - res.dual[2 * x] for x in range(npoints)]
    dual = DualCertificate(n, d, tuple(phi_values))

    achieved = max(abs(primal.value(x) - f.values[x]) for x in range(npoints))
    if achieved != optimum:
        raise AssertionError("primal witness does not achieve the optimum")
    if dual.norm() > 1 or dual.inner_table(f) != optimum:
        raise AssertionError("dual witness does not achieve the optimum")
    for c, m in zip(conjs, masks):
        total = Fraction(0)
        mm, i = m, 0
        while mm:
            if mm & 1:
                total += dual.values[i]
            mm >>= 1
            i += 1
        if total > 0:
            raise AssertionError("dual witness violates a conjunction constraint")
    return LpResult(optimum=optimum, primal=primal, dual=dual)


@dataclass(frozen=True)
class CertificateVerdict:
    accepted: bool
    reason: str | None
    correlation: Fraction | None


def verify_dual_certificate(
    phi: DualCertificate, f: RealTable, delta: Fraction
) -> CertificateVerdict:
    """Accept iff phi has norm <= 1, nonpositive correlation with every
    width-<=d conjunction, and correlation with f strictly above delta.

    Acceptance certifies that no degree-<=d conical junta approximates f to
    pointwise error delta. The violated constraint is reported on rejection.
    """
    if phi.arity != f.arity:
        raise PreconditionError("certificate and table arities differ")
    delta = Fraction(delta)
    norm = phi.norm()
    if norm > 1:
        return CertificateVerdict(False, f"norm {norm} exceeds 1", None)
    for c in all_conjunctions(phi.arity, phi.degree):
        corr = phi.inner_conjunction(c)
        if corr > 0:
            return CertificateVerdict(False, f"positive correlation {corr} with {c}", None)
    value = phi.inner_table(f)
    if value <= delta:
        return CertificateVerdict(False, f"correlation {value} is not above {delta}", value)
    return CertificateVerdict(True, None, value)


def certificate_is_feasible(phi: DualCertificate) -> bool:
    """Norm and sign conditions only, without any correlation target."""
    if phi.norm() > 1:
        return False
    return all(
        phi.inner_conjunction(c) <= 0 for c in all_conjunctions(phi.arity, phi.degree)
    )


def tensor_certificate(phi: DualCertificate) -> DualCertificate:
    """The negated tensor square (x, y) -> -phi(x) phi(y) on twice the variables.

    Preserves feasibility at the same degree parameter: the norm squares, and
    every width-<=d conjunction on 2n variables splits into two width-<=d
    parts whose correlations multiply and flip sign.
    """
    if not certificate_is_feasible(phi):
        raise PreconditionError("input certificate is not feasible")
    n = phi.arity
    size = 1 << n
    values = tuple(
        -phi.values[x] * phi.values[y] for x in range(size) for y in range(size)
    )
    return DualCertificate(2 * n, phi.degree, values)


def powering_exponent(delta: Fraction) -> int:
    """Least k >= 1 with (3/4)**k <= delta, by exact integer search."""
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie strictly between 0 and 1")
    k, power = 1, Fraction(3, 4)
    while power > delta:
        k += 1
        power *= Fraction(3, 4)
    return k


def _mpf_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    frac = Fraction(int(man)) * (Fraction(2) ** exp)
    return -frac if sign else frac


def powering_epsilon_interval(delta: Fraction, k: int | None = None) -> tuple[Fraction, Fraction]:
    """Certified rational enclosure of ln(1+delta)/k with outward rounding."""
    delta = Fraction(delta)
    if k is None:
        k = powering_exponent(delta)
    with mpmath.workprec(80):
        iv = mpmath.iv.mpf(delta.numerator) / mpmath.iv.mpf(delta.denominator)
        val = mpmath.iv.log(1 + iv) / k
        raw_lo, raw_hi = val._mpi_
        lo, hi = _mpf_to_fraction(raw_lo), _mpf_to_fraction(raw_hi)
    if not lo <= hi:
        raise AssertionError("interval endpoints out of order")
    return lo, hi


def power_junta(
    g: ConicalJunta,
    eps: Fraction,
    delta: Fraction,
    f: TruthTable | None = None,
) -> ConicalJunta:
    """The powered junta ((g + eps)/2)**k with k the least power of 3/4 below delta.

    When g approximates 1+f to pointwise error eps (checked when f is given),
    the result approximates f to pointwise error delta, with degree at most
    k * deg(g).
    """
    eps, delta = Fraction(eps), Fraction(delta)
    if delta >= Fraction(1, 2):
        raise PreconditionError("delta must be below 1/2")
    k = powering_exponent(delta)
    if f is not None:
        if f.arity != g.arity:
            raise PreconditionError("junta and table arities differ")
        for x in range(1 << f.arity):
            if abs(g.value(x) - (1 + f.values[x])) > eps:
                raise PreconditionError(
                    f"junta is not an eps-approximation of 1+f at index {x}"
                )
    base = g.scale(Fraction(1, 2)).plus_constant(eps / 2)
    result = base
    for _ in range(k - 1):
        result = result.times(base)
    return result


def or_shift_junta(h: ConicalJunta, f: TruthTable) -> ConicalJunta:
    """The 2n-variable junta (h(x) + h(y))/2 + 1/4 for h computing f exactly.

    Its value is 1/4, 3/4 or 5/4 according to how many of f(x), f(y) are 1,
    so it approximates (x, y) -> f(x) or f(y) to pointwise error 1/4 without
    increasing the degree.
    """
    if h.arity != f.arity:
        raise PreconditionError("junta and table arities differ")
    for x in range(1 << f.arity):
        if h.value(x) != f.values[x]:
            raise PreconditionError(f"junta does not compute the table at index {x}")
    n = h.arity
    half = Fraction(1, 2)
    terms = [(w * half, c) for w, c in h.terms]
    terms += [(w * half, c.shift(n)) for w, c in h.terms]
    terms.append((Fraction(1, 4), Conjunction(())))
    return ConicalJunta(2 * n, tuple(terms))
