"""NFA core: semantics, closure operations, unambiguity, and rectangle extraction.

All languages of interest are length-homogeneous slices, so comparisons are
made on fixed-length word sets. Constructions name their states
deterministically and prune states that are not both reachable and
co-reachable, so serialized automata are byte-stable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .boolfn import DnfFormula
from .commx import Rectangle
from .errors import PreconditionError, ResourceLimitError

BINARY = ("0", "1")
SUBSET_STATE_BOUND = 1 << 20
ENUMERATION_BOUND = 1 << 20


@dataclass(frozen=True)
class Nfa:
    """An NFA with integer states 0..num_states-1.

    `state_names` optionally records construction-time labels; it never takes
    part in equality of behaviour, only in serialization/diagnostics.
    """

    num_states: int
    alphabet: tuple[str, ...]
    transitions: frozenset[tuple[int, str, int]]
    initial: frozenset[int]
    accepting: frozenset[int]
    state_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        for q in self.initial | self.accepting:
            if not 0 <= q < self.num_states:
                raise ValueError(f"state {q} out of range")
        for p, a, q in self.transitions:
            if not (0 <= p < self.num_states and 0 <= q < self.num_states):
                raise ValueError(f"transition endpoint out of range: {(p, a, q)}")
            if a not in self.alphabet:
                raise ValueError(f"transition symbol {a!r} not in alphabet")
        if self.state_names is not None and len(self.state_names) != self.num_states:
            raise ValueError("state_names length mismatch")

    def step_map(self) -> dict[tuple[int, str], frozenset[int]]:
        cached = self.__dict__.get("_step_map")
        if cached is None:
            acc: dict[tuple[int, str], set[int]] = {}
            for p, a, q in self.transitions:
                acc.setdefault((p, a), set()).add(q)
            cached = {k: frozenset(v) for k, v in acc.items()}
            object.__setattr__(self, "_step_map", cached)
        return cached

    def step(self, states: frozenset[int], symbol: str) -> frozenset[int]:
        m = self.step_map()
        out: set[int] = set()
        for q in states:
            out |= m.get((q, symbol), frozenset())
        return frozenset(out)

    def is_dfa(self) -> bool:
        if len(self.initial) != 1:
            return False
        m = self.step_map()
        return all(
            len(m.get((q, a), ())) == 1 for q in range(self.num_states) for a in self.alphabet
        )


class NfaBuilder:
    """Accumulates a labelled automaton; labels become ids in insertion order."""

    def __init__(self, alphabet=BINARY):
        self.alphabet = tuple(alphabet)
        self._ids: dict = {}
        self._names: list[str] = []
        self.transitions: set[tuple[int, str, int]] = set()
        self.initial: set[int] = set()
        self.accepting: set[int] = set()

    def state(self, label) -> int:
        if label not in self._ids:
            self._ids[label] = len(self._names)
            self._names.append(str(label))
        return self._ids[label]

    def add(self, p, symbol: str, q) -> None:
        self.transitions.add((self.state(p), symbol, self.state(q)))

    def mark_initial(self, label) -> None:
        self.initial.add(self.state(label))

    def mark_accepting(self, label) -> None:
        self.accepting.add(self.state(label))

    def build(self, *, prune: bool = True) -> Nfa:
        nfa = Nfa(
            num_states=len(self._names),
            alphabet=self.alphabet,
            transitions=frozenset(self.transitions),
            initial=frozenset(self.initial),
            accepting=frozenset(self.accepting),
            state_names=tuple(self._names),
        )
        return prune_dead_states(nfa) if prune else nfa


def prune_dead_states(A: Nfa) -> Nfa:
    """Restrict to states both reachable from initial ones and co-reachable to accepting ones."""
    fwd: dict[int, set[int]] = {}
    bwd: dict[int, set[int]] = {}
    for p, _, q in A.transitions:
        fwd.setdefault(p, set()).add(q)
        bwd.setdefault(q, set()).add(p)

    def closure(seed, edges):
        seen = set(seed)
        todo = deque(seed)
        while todo:
            u = todo.popleft()
            for v in edges.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return seen

    live = closure(A.initial, fwd) & closure(A.accepting, bwd)
    keep = sorted(live)
    remap = {q: i for i, q in enumerate(keep)}
    return Nfa(
        num_states=len(keep),
        alphabet=A.alphabet,
        transitions=frozenset(
            (remap[p], a, remap[q]) for p, a, q in A.transitions if p in live and q in live
        ),
        initial=frozenset(remap[q] for q in A.initial if q in live),
        accepting=frozenset(remap[q] for q in A.accepting if q in live),
        state_names=tuple(A.state_names[q] for q in keep) if A.state_names else None,
    )


def accepts(A: Nfa, word: str) -> bool:
    """Forward subset reachability: does some accepting run read the word?"""
    for ch in word:
        if ch not in A.alphabet:
            raise PreconditionError(f"symbol {ch!r} not in the alphabet {A.alphabet}")
    current = A.initial
    for ch in word:
        current = A.step(current, ch)
        if not current:
            return False
    return bool(current & A.accepting)


def enumerate_language(A: Nfa, length: int, *, bound: int = ENUMERATION_BOUND) -> frozenset[str]:
    """The exact length-`length` slice of the language, by shared-prefix search."""
    if len(A.alphabet) ** length > bound:
        raise ResourceLimitError(f"{len(A.alphabet)}^{length} words exceed the bound {bound}")
    out: list[str] = []

    def go(prefix: str, states: frozenset[int]):
        if len(prefix) == length:
            if states & A.accepting:
                out.append(prefix)
            return
        for ch in A.alphabet:
            nxt = A.step(states, ch)
            if nxt:
                go(prefix + ch, nxt)

    go("", A.initial)
    return frozenset(out)


@dataclass(frozen=True)
class FiniteLanguageView:
    """A fixed word length together with an automaton recognizing the slice."""

    automaton: Nfa
    length: int

    def words(self) -> frozenset[str]:
        return enumerate_language(self.automaton, self.length)


def is_unambiguous_nfa(A: Nfa) -> bool:
    """Polynomial check: track pairs of runs and whether they have diverged.

    The automaton is ambiguous iff a pair state (p, q, diverged=True) with
    both components accepting is reachable in the self-product that starts
    from all pairs of initial states.
    """
    m = A.step_map()
    start = {
        (p, q, p != q) for p in A.initial for q in A.initial
    }
    seen = set(start)
    todo = deque(start)
    while todo:
        p, q, div = todo.popleft()
        if div and p in A.accepting and q in A.accepting:
            return False
        for a in A.alphabet:
            for p2 in m.get((p, a), ()):
                for q2 in m.get((q, a), ()):
                    nxt = (p2, q2, div or p2 != q2)
                    if nxt not in seen:
                        seen.add(nxt)
                        todo.append(nxt)
    return True


def product_intersect(A: Nfa, B: Nfa, *, prune: bool = True) -> Nfa:
    """Product automaton recognizing the intersection; UFA x UFA stays unambiguous."""
    if A.alphabet != B.alphabet:
        raise PreconditionError("alphabet mismatch")
    builder = NfaBuilder(A.alphabet)
    ma, mb = A.step_map(), B.step_map()
    start = sorted((p, q) for p in A.initial for q in B.initial)
    todo = deque(start)
    seen = set(start)
    for s in start:
        builder.mark_initial(s)
    while todo:
        p, q = todo.popleft()
        if p in A.accepting and q in B.accepting:
            builder.mark_accepting((p, q))
        for a in A.alphabet:
            for p2 in sorted(ma.get((p, a), ())):
                for q2 in sorted(mb.get((q, a), ())):
                    builder.add((p, q), a, (p2, q2))
                    if (p2, q2) not in seen:
                        seen.add((p2, q2))
                        todo.append((p2, q2))
    return builder.build(prune=prune)


def disjoint_union(A: Nfa, B: Nfa) -> Nfa:
    """Side-by-side union; unambiguous when the operands are UFAs with disjoint languages."""
    if A.alphabet != B.alphabet:
        raise PreconditionError("alphabet mismatch")
    off = A.num_states
    names: tuple[str, ...] | None = None
    if A.state_names is not None and B.state_names is not None:
        names = tuple(f"L.{s}" for s in A.state_names) + tuple(f"R.{s}" for s in B.state_names)
    return Nfa(
        num_states=A.num_states + B.num_states,
        alphabet=A.alphabet,
        transitions=frozenset(A.transitions)
        | frozenset((p + off, a, q + off) for p, a, q in B.transitions),
        initial=frozenset(A.initial) | frozenset(q + off for q in B.initial),
        accepting=frozenset(A.accepting) | frozenset(q + off for q in B.accepting),
        state_names=names,
    )


def determinize(A: Nfa, *, state_bound: int = SUBSET_STATE_BOUND) -> Nfa:
    """Subset construction producing a complete DFA (the empty subset is a state)."""
    builder = NfaBuilder(A.alphabet)
    start = frozenset(A.initial)
    seen = {start}
    todo = deque([start])
    builder.mark_initial(tuple(sorted(start)))
    while todo:
        s = todo.popleft()
        label = tuple(sorted(s))
        if s & A.accepting:
            builder.mark_accepting(label)
        for a in A.alphabet:
            t = A.step(s, a)
            builder.add(label, a, tuple(sorted(t)))
            if t not in seen:
                if len(seen) >= state_bound:
                    raise ResourceLimitError(
                        f"determinization exceeds {state_bound} subset states"
                    )
                seen.add(t)
                todo.append(t)
    return builder.build(prune=False)


def length_counter_dfa(length: int, alphabet=BINARY, *, prune: bool = True) -> Nfa:
    """Complete DFA accepting exactly the words of the given length.

    Built with length+2 states (counts 0..length plus an overflow trap); the
    trap is dead and disappears when pruning is enabled.
    """
    builder = NfaBuilder(alphabet)
    builder.mark_initial(0)
    builder.mark_accepting(length)
    for i in range(length):
        for a in alphabet:
            builder.add(i, a, i + 1)
    for a in alphabet:
        builder.add(length, a, length + 1)
        builder.add(length + 1, a, length + 1)
    return builder.build(prune=prune)


def fixed_length_complement(
    A: Nfa, length: int, *, prune: bool = True, state_bound: int = SUBSET_STATE_BOUND
) -> Nfa:
    """DFA for {0,1}^length minus the length-`length` slice of L(A).

    Determinize, flip acceptance, and intersect with the length counter; the
    result is deterministic, hence unambiguous.
    """
    D = determinize(A, state_bound=state_bound)
    flipped = Nfa(
        num_states=D.num_states,
        alphabet=D.alphabet,
        transitions=D.transitions,
        initial=D.initial,
        accepting=frozenset(range(D.num_states)) - D.accepting,
        state_names=D.state_names,
    )
    counter = length_counter_dfa(length, A.alphabet, prune=False)
    return product_intersect(flipped, counter, prune=prune)


def dnf_to_ufa(D: DnfFormula, length: int, *, prune: bool = True) -> Nfa:
    """One checking chain per deduplicated term, reading `length` bits positionally.

    The t-th chain fixes the t-th term's literals as it reads; the automaton
    accepts exactly the satisfying assignments and is unambiguous iff the
    deduplicated DNF is.
    """
    if D.arity != length:
        raise PreconditionError(f"DNF arity {D.arity} differs from word length {length}")
    dedup = D.dedup()
    builder = NfaBuilder(BINARY)
    for t, term in enumerate(dedup.terms):
        need = dict(term.literals)
        builder.mark_initial((t, 0))
        builder.mark_accepting((t, length))
        for pos in range(length):
            allowed = BINARY if pos not in need else (("1",) if need[pos] else ("0",))
            for ch in allowed:
                builder.add((t, pos), ch, (t, pos + 1))
    return builder.build(prune=prune)


def _forward_sets(A: Nfa, length: int) -> list[frozenset[int]]:
    sets = [frozenset(A.initial)]
    for _ in range(length):
        nxt = []
        for s in sets:
            for ch in BINARY:
                nxt.append(A.step(s, ch))
        sets = nxt
    return sets


def _backward_sets(A: Nfa, length: int) -> list[frozenset[int]]:
    pre: dict[tuple[str, int], set[int]] = {}
    for p, a, q in A.transitions:
        pre.setdefault((a, q), set()).add(p)
    sets = [frozenset(A.accepting)]
    for j in range(length):
        nxt: list[frozenset[int]] = [frozenset()] * (2 * len(sets))
        for v, s in enumerate(sets):
            for bit, ch in enumerate(BINARY):
                acc: set[int] = set()
                for q in s:
                    acc |= pre.get((ch, q), set())
                nxt[bit * len(sets) + v] = frozenset(acc)
        sets = nxt
    return sets


def nfa_to_cover(A: Nfa, split: tuple[int, int]) -> list[Rectangle]:
    """One rectangle per state q: inputs reaching q times suffixes accepted from q.

    The rectangles cover exactly the accepted (x, y) pairs of the slice;
    empty ones are dropped, so at most `num_states` rectangles are returned.
    """
    if tuple(A.alphabet) != BINARY:
        raise PreconditionError("rectangle extraction requires the binary alphabet")
    m1, m2 = split
    reach = _forward_sets(A, m1)
    coreach = _backward_sets(A, m2)
    out = []
    for q in range(A.num_states):
        rows = frozenset(x for x in range(1 << m1) if q in reach[x])
        cols = frozenset(y for y in range(1 << m2) if q in coreach[y])
        if rows and cols:
            out.append(Rectangle(rows, cols))
    return out


def ufa_to_partition(A: Nfa, split: tuple[int, int]) -> list[Rectangle]:
    """The same extraction for a UFA; the rectangles are verified pairwise disjoint."""
    if not is_unambiguous_nfa(A):
        raise PreconditionError("automaton is ambiguous")
    rects = nfa_to_cover(A, split)
    seen: dict[int, int] = {}
    for rect in rects:
        colmask = sum(1 << j for j in rect.cols)
        for i in rect.rows:
            if seen.get(i, 0) & colmask:
                raise AssertionError("UFA rectangles overlap; unambiguity check is broken")
            seen[i] = seen.get(i, 0) | colmask
    return rects


def _phase_product(A: Nfa, schedule: list[tuple[str, int]], *, prune: bool = True) -> Nfa:
    """Product with a position counter; `run` phases step A, `skip` phases freeze it."""
    builder = NfaBuilder(A.alphabet)
    m = A.step_map()
    total = sum(n for _, n in schedule)
    kinds: list[str] = []
    for kind, n in schedule:
        kinds.extend([kind] * n)
    for q in sorted(A.initial):
        builder.mark_initial((q, 0))
    for q in sorted(A.accepting):
        builder.mark_accepting((q, total))
    frontier = {q for q in A.initial}
    states_at = [set(frontier)]
    for pos in range(total):
        nxt: set[int] = set()
        for q in sorted(states_at[pos]):
            if kinds[pos] == "run":
                for a in A.alphabet:
                    for q2 in sorted(m.get((q, a), ())):
                        builder.add((q, pos), a, (q2, pos + 1))
                        nxt.add(q2)
            else:
                for a in A.alphabet:
                    builder.add((q, pos), a, (q, pos + 1))
                nxt.add(q)
        states_at.append(nxt)
    return builder.build(prune=prune)


def build_padded_pair(A: Nfa, m1: int, m2: int, *, prune: bool = True) -> tuple[Nfa, Nfa]:
    """UFAs for the two padded languages over words x x' y y'.

    The first runs A on x and y and skips the primed blocks; the second skips
    the unprimed blocks and runs A on x' and y'. Their union is the slice of
    pairs where either copy is accepted.
    """
    if not is_unambiguous_nfa(A):
        raise PreconditionError("automaton is ambiguous")
    first = _phase_product(A, [("run", m1), ("skip", m1), ("run", m2), ("skip", m2)], prune=prune)
    second = _phase_product(A, [("skip", m1), ("run", m1), ("skip", m2), ("run", m2)], prune=prune)
    return first, second
