"""Sparse set disjointness: encodings, automata, and the rank lower-bound chain.

A pair of k-element subsets of {0,...,n-1} is encoded as the concatenation of
the two n-bit characteristic vectors (position i is 1 iff element i belongs
to the set). The positive automaton accepts exactly the encodings of disjoint
pairs, via a verified family of separating sets sampled by the probabilistic
method; the complement automaton accepts every other word, malformed or
intersecting, of any length.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

import mpmath

from .automata import BINARY, Nfa, NfaBuilder, disjoint_union
from .commx import CommMatrix
from .errors import PreconditionError, ResourceLimitError

SAMPLE_RETRY_BUDGET = 64
MATRIX_SIDE_BOUND = 4096


@dataclass(frozen=True)
class SetPair:
    """Two k-element subsets of {0,...,n-1}; the pair is positive when disjoint."""

    n: int
    k: int
    s: frozenset[int]
    t: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "s", frozenset(self.s))
        object.__setattr__(self, "t", frozenset(self.t))
        if not (0 <= self.k <= self.n):
            raise ValueError("need 0 <= k <= n")
        for side in (self.s, self.t):
            if len(side) != self.k or any(not 0 <= e < self.n for e in side):
                raise ValueError("sets must be k-element subsets of range(n)")

    @property
    def disjoint(self) -> bool:
        return not (self.s & self.t)


def _mask_word(elements: frozenset[int], n: int) -> str:
    return "".join("1" if i in elements else "0" for i in range(n))


def encode_pair(pair: SetPair) -> str:
    """The 2n-letter word: characteristic vector of s, then of t."""
    return _mask_word(pair.s, pair.n) + _mask_word(pair.t, pair.n)


def subsets_colex(n: int, k: int) -> list[frozenset[int]]:
    """All k-subsets of range(n) in colexicographic order."""
    subs = [frozenset(c) for c in combinations(range(n), k)]
    subs.sort(key=lambda s: tuple(sorted(s, reverse=True)))
    return subs


def family_size_formula(n: int, k: int) -> int:
    """ceil(2^(2k) * ln(C(n,k)^2)), evaluated with a certified enclosure."""
    c = math.comb(n, k)
    if c <= 1:
        return 0
    for prec in (80, 160, 320):
        with mpmath.workprec(prec):
            val = mpmath.iv.log(mpmath.iv.mpf(c)) * 2 * (1 << (2 * k))
            lo, hi = val._mpi_
            lo_c = int(mpmath.ceil(mpmath.mpf(lo)))
            hi_c = int(mpmath.ceil(mpmath.mpf(hi)))
        if lo_c == hi_c:
            return lo_c
    raise AssertionError("could not certify the ceiling; boundary case")


@dataclass(frozen=True)
class SeparatingFamily:
    """Sets Z_1..Z_l such that every disjoint (S, T) has S inside some Z_i avoiding T."""

    n: int
    k: int
    sets: tuple[frozenset[int], ...]
    seed: int
    attempts: int
    verified: bool

    @property
    def ell(self) -> int:
        return len(self.sets)

    def separates(self, pair: SetPair) -> bool:
        return any(pair.s <= z and not (z & pair.t) for z in self.sets)


def verify_family(n: int, k: int, sets) -> bool:
    """Exhaustive check over every disjoint pair, independent of how sets were drawn."""
    sets = tuple(frozenset(z) for z in sets)
    for s in combinations(range(n), k):
        rest = [e for e in range(n) if e not in s]
        s_set = frozenset(s)
        for t in combinations(rest, k):
            t_set = frozenset(t)
            if not any(s_set <= z and not (z & t_set) for z in sets):
                return False
    return True


def sample_separating_sets(
    n: int, k: int, seed: int = 0, *, retry_budget: int = SAMPLE_RETRY_BUDGET
) -> SeparatingFamily:
    """Draw ceil(2^(2k) ln C(n,k)^2) uniform subsets and verify separation exhaustively.

    Subsets are drawn bit by bit from Python's Mersenne Twister seeded
    deterministically; on verification failure the next seed is tried, and
    the attempt count is recorded in the returned family.
    """
    if math.comb(n, k) ** 2 > MATRIX_SIDE_BOUND**2:
        raise ResourceLimitError("too many pairs to verify exhaustively")
    if k == 0:
        # the empty pair is separated by the empty set; the formula yields 0 sets
        return SeparatingFamily(
            n=n, k=0, sets=(frozenset(),), seed=seed, attempts=1, verified=True
        )
    ell = family_size_formula(n, k)
    for attempt in range(1, retry_budget + 1):
        rng = random.Random(seed + attempt - 1)
        sets = tuple(
            frozenset(i for i in range(n) if rng.getrandbits(1)) for _ in range(ell)
        )
        if verify_family(n, k, sets):
            return SeparatingFamily(
                n=n, k=k, sets=sets, seed=seed + attempt - 1, attempts=attempt, verified=True
            )
    raise PreconditionError(
        f"no verified family within {retry_budget} attempts at ell={ell}; "
        "the union-bound guarantee makes this overwhelmingly unlikely"
    )


def build_complement_nfa(n: int, k: int) -> Nfa:
    """Accepts every word that is not the encoding of a disjoint pair of k-subsets.

    Three branch groups: words whose length is not 2n, length-2n words that
    are malformed (a half without exactly k ones), and encodings whose halves
    share an element (one guess branch per position). Intersecting encodings
    are caught by the guess branches; everything else falls to the first two.
    """
    builder = NfaBuilder(BINARY)

    # branch 1: any word whose length differs from 2n
    builder.mark_initial(("len", 0))
    for pos in range(2 * n + 2):
        if pos != 2 * n:
            builder.mark_accepting(("len", pos))
        nxt = min(pos + 1, 2 * n + 1)
        for ch in BINARY:
            builder.add(("len", pos), ch, ("len", nxt))

    # branch 2: length-2n words with a bad ones-count in either half
    builder.mark_initial(("first", 0, 0))
    cap = k + 1
    for pos in range(n):
        for c in range(min(pos, cap) + 1):
            for ch in BINARY:
                c2 = min(c + int(ch), cap)
                builder.add(("first", pos, c), ch, ("first", pos + 1, c2))
    # first half bad: absorb the rest of the word, accept only at length 2n
    for c in range(min(n, cap) + 1):
        if c != k:
            for ch in BINARY:
                builder.add(("first", n, c), ch, ("absorb", n + 1))
    for pos in range(n + 1, 2 * n):
        for ch in BINARY:
            builder.add(("absorb", pos), ch, ("absorb", pos + 1))
    if n >= 1:
        builder.mark_accepting(("absorb", 2 * n))
    # first half good: count the second half, accept bad counts at the end
    if k <= n:
        for pos in range(n, 2 * n):
            for c in range(min(pos - n, cap) + 1):
                for ch in BINARY:
                    c2 = min(c + int(ch), cap)
                    builder.add(
                        ("second", pos, c) if pos > n else ("first", n, k),
                        ch,
                        ("second", pos + 1, c2),
                    )
        for c in range(min(n, cap) + 1):
            if c != k:
                builder.mark_accepting(("second", 2 * n, c))

    # branch 3: guess a shared element i, check position i and n+i are both 1
    for i in range(n):
        builder.mark_initial(("hit", i, 0))
        for pos in range(2 * n):
            if pos in (i, n + i):
                builder.add(("hit", i, pos), "1", ("hit", i, pos + 1))
            else:
                for ch in BINARY:
                    builder.add(("hit", i, pos), ch, ("hit", i, pos + 1))
        builder.mark_accepting(("hit", i, 2 * n))

    return builder.build(prune=True)


def build_disj_nfa(n: int, k: int, family: SeparatingFamily) -> Nfa:
    """Accepts exactly the encodings of disjoint pairs, using a verified family.

    One branch per family set Z: in the first half, positions outside Z must
    read 0 (so S is inside Z); in the second half, positions inside Z must
    read 0 (so Z avoids T). Each branch counts ones per half, enforcing the
    exactly-k format.
    """
    if not family.verified:
        raise PreconditionError("the separating family is not verified")
    if (family.n, family.k) != (n, k):
        raise PreconditionError("family parameters do not match")
    builder = NfaBuilder(BINARY)
    cap = k + 1
    for zi, z in enumerate(family.sets):
        builder.mark_initial((zi, 0, 0))
        for pos in range(2 * n):
            in_first = pos < n
            element = pos if in_first else pos - n
            allowed: tuple[str, ...]
            if in_first:
                allowed = BINARY if element in z else ("0",)
            else:
                allowed = ("0",) if element in z else BINARY
            counts = range(min(pos if in_first else pos - n, cap) + 1)
            for c in counts:
                for ch in allowed:
                    c2 = min(c + int(ch), cap)
                    if in_first and pos == n - 1 and c2 != k:
                        continue  # first half must have exactly k ones
                    tgt_count = c2 if pos != n - 1 else 0
                    builder.add((zi, pos, c), ch, (zi, pos + 1, tgt_count))
        builder.mark_accepting((zi, 2 * n, k))
    return builder.build(prune=True)


def disj_matrix(n: int, k: int, *, side_bound: int = MATRIX_SIDE_BOUND) -> CommMatrix:
    """Boolean matrix over k-subsets in colex order; entry 1 iff the subsets are disjoint."""
    subs = subsets_colex(n, k)
    if len(subs) > side_bound:
        raise ResourceLimitError(f"{len(subs)} subsets exceed the bound {side_bound}")
    labels = tuple(_mask_word(s, n) for s in subs)
    entries = tuple(
        tuple(int(not (s & t)) for t in subs) for s in subs
    )
    return CommMatrix(labels, labels, entries)


def ufa_size_lower_bound(n: int, k: int) -> int:
    """States needed by any unambiguous automaton for the disjointness encoding.

    The rank of the disjointness matrix lower-bounds the partition number and
    hence the state count. For n >= 2k the matrix has full rank C(n,k), which
    is checked; for n < 2k there are no disjoint pairs and the bound is 0.
    """
    from .commx import rational_rank

    rank = rational_rank(disj_matrix(n, k))
    expected = math.comb(n, k) if n >= 2 * k else 0
    if rank != expected:
        raise AssertionError(f"disjointness rank {rank} differs from expected {expected}")
    return rank
