"""Gadgets, decision trees, and blockwise composition of an outer function.

A gadget is a two-party function on b+b bits (first block one party, second
block the other) together with a decision tree of depth at most 2b. Composing
an outer n-variable function with n gadget copies yields a two-party function
on bn+bn bits; the same composition is available at the DNF level by
substituting the tree-derived unambiguous DNFs of the gadget and its negation
into an unambiguous DNF of the outer function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .boolfn import (
    Conjunction,
    DnfFormula,
    TruthTable,
    index_of_word,
    is_unambiguous_dnf,
    word_of_index,
)
from .commx import CommMatrix
from .errors import PreconditionError, ResourceLimitError

MATERIALIZE_CELL_BOUND = 1 << 18


@dataclass(frozen=True)
class DtLeaf:
    value: int


@dataclass(frozen=True)
class DtNode:
    var: int
    if0: "DecisionTree"
    if1: "DecisionTree"


DecisionTree = DtLeaf | DtNode


def tree_depth(tree: DecisionTree) -> int:
    if isinstance(tree, DtLeaf):
        return 0
    return 1 + max(tree_depth(tree.if0), tree_depth(tree.if1))


def tree_value(tree: DecisionTree, word: str) -> int:
    while isinstance(tree, DtNode):
        tree = tree.if1 if word[tree.var] == "1" else tree.if0
    return tree.value


def _restricted_values(table: TruthTable, assign: dict[int, str]) -> set[int]:
    free = [v for v in range(table.arity) if v not in assign]
    vals: set[int] = set()
    for bits in itertools.product("01", repeat=len(free)):
        word = ["?"] * table.arity
        for v, ch in assign.items():
            word[v] = ch
        for v, ch in zip(free, bits):
            word[v] = ch
        vals.add(table.value("".join(word)))
        if len(vals) == 2:
            break
    return vals


def fixed_order_tree(table: TruthTable, order: tuple[int, ...] | None = None) -> DecisionTree:
    """Query variables in a fixed order, stopping early when the rest is constant."""
    if order is None:
        order = tuple(range(table.arity))

    def build(assign: dict[int, str], remaining: tuple[int, ...]) -> DecisionTree:
        vals = _restricted_values(table, assign)
        if len(vals) == 1:
            return DtLeaf(vals.pop())
        var = remaining[0]
        rest = remaining[1:]
        return DtNode(
            var,
            build({**assign, var: "0"}, rest),
            build({**assign, var: "1"}, rest),
        )

    return build({}, order)


def optimal_tree(table: TruthTable) -> DecisionTree:
    """Minimum-depth decision tree by exhaustive search; exponential, small arities only."""
    if table.arity > 4:
        raise ResourceLimitError("optimal tree search is limited to arity 4")

    from functools import lru_cache

    n = table.arity

    @lru_cache(maxsize=None)
    def best(assign: tuple[tuple[int, str], ...]) -> tuple[int, DecisionTree]:
        fixed = dict(assign)
        free = [v for v in range(n) if v not in fixed]
        vals = _restricted_values(table, fixed)
        if len(vals) == 1:
            return 0, DtLeaf(vals.pop())
        results = []
        for var in free:
            d0, t0 = best(tuple(sorted(fixed.items() | {(var, "0")})))
            d1, t1 = best(tuple(sorted(fixed.items() | {(var, "1")})))
            results.append((1 + max(d0, d1), DtNode(var, t0, t1)))
        return min(results, key=lambda r: r[0])

    return best(())[1]


@dataclass(frozen=True)
class Gadget:
    """A two-party table on bits+bits inputs with a witnessing decision tree."""

    bits: int
    table: TruthTable
    tree: DecisionTree

    def __post_init__(self):
        if self.table.arity != 2 * self.bits:
            raise ValueError("gadget table must have arity 2*bits")
        if tree_depth(self.tree) > 2 * self.bits:
            raise ValueError("decision tree deeper than the number of inputs")
        for i in range(1 << self.table.arity):
            w = word_of_index(i, self.table.arity)
            if tree_value(self.tree, w) != self.table.value(i):
                raise ValueError(f"decision tree disagrees with the table at {w}")

    @classmethod
    def from_table(cls, bits: int, table: TruthTable, tree: DecisionTree | None = None):
        return cls(bits, table, fixed_order_tree(table) if tree is None else tree)

    def value(self, alice: str, bob: str) -> int:
        return self.table.value(alice + bob)


def and_gadget() -> Gadget:
    return Gadget.from_table(1, TruthTable(2, (0, 0, 0, 1)))


def xor_gadget() -> Gadget:
    return Gadget.from_table(1, TruthTable(2, (0, 1, 1, 0)))


def inner_product_gadget(bits: int) -> Gadget:
    """Inner product mod 2 on bits+bits inputs, the default lifting gadget."""

    def ip(word: str) -> int:
        x, y = word[:bits], word[bits:]
        return sum(int(a) & int(b) for a, b in zip(x, y)) & 1

    return Gadget.from_table(bits, TruthTable.from_function(2 * bits, ip))


def tree_dnfs(tree: DecisionTree, arity: int) -> tuple[DnfFormula, DnfFormula]:
    """Unambiguous DNFs for a tree's function and its negation, one term per leaf.

    Root-to-leaf paths are pairwise contradictory, so both DNFs are
    unambiguous, with width bounded by the tree depth.
    """
    pos_terms: list[Conjunction] = []
    neg_terms: list[Conjunction] = []

    def walk(node: DecisionTree, path: tuple[tuple[int, bool], ...]):
        if isinstance(node, DtLeaf):
            (pos_terms if node.value else neg_terms).append(Conjunction(path))
            return
        walk(node.if0, path + ((node.var, False),))
        walk(node.if1, path + ((node.var, True),))

    walk(tree, ())
    return DnfFormula(arity, tuple(pos_terms)), DnfFormula(arity, tuple(neg_terms))


def tree_to_unambiguous_dnfs(g: Gadget) -> tuple[DnfFormula, DnfFormula]:
    """Unambiguous DNFs for the gadget and its negation, extracted from its tree."""
    return tree_dnfs(g.tree, 2 * g.bits)


@dataclass(frozen=True)
class ComposedFunction:
    """The blockwise composition outer(gadget(x_1,y_1), ..., gadget(x_n,y_n)).

    One party holds the n concatenated b-bit blocks x, the other holds y.
    """

    outer: TruthTable
    gadget: Gadget
    copies: int

    def __post_init__(self):
        if self.outer.arity != self.copies:
            raise ValueError("outer arity must equal the number of gadget copies")

    @property
    def party_bits(self) -> int:
        return self.gadget.bits * self.copies

    def value(self, x: str, y: str) -> int:
        b = self.gadget.bits
        if len(x) != self.party_bits or len(y) != self.party_bits:
            raise PreconditionError("party inputs must have bits*copies length each")
        inner = "".join(
            str(self.gadget.value(x[i * b : (i + 1) * b], y[i * b : (i + 1) * b]))
            for i in range(self.copies)
        )
        return self.outer.value(inner)

    def table(self) -> TruthTable:
        """Truth table over the 2*bits*copies variables, x block then y block."""
        total = 2 * self.party_bits
        if (1 << total) > MATERIALIZE_CELL_BOUND:
            raise ResourceLimitError("composed table too large to materialize")
        half = self.party_bits
        vals = []
        for i in range(1 << total):
            w = word_of_index(i, total)
            vals.append(self.value(w[:half], w[half:]))
        return TruthTable(total, tuple(vals))

    def comm_matrix(self) -> CommMatrix:
        half = self.party_bits
        if (1 << (2 * half)) > MATERIALIZE_CELL_BOUND:
            raise ResourceLimitError("composed matrix too large to materialize")
        labels = tuple(word_of_index(i, half) for i in range(1 << half))
        entries = tuple(
            tuple(self.value(x, y) for y in labels) for x in labels
        )
        return CommMatrix(labels, labels, entries)


def compose_function(f: TruthTable, g: Gadget, copies: int) -> ComposedFunction:
    if f.arity != copies:
        raise PreconditionError(f"outer arity {f.arity} must equal copies {copies}")
    return ComposedFunction(f, g, copies)


def compose_dnf(outer_dnf: DnfFormula, g: Gadget) -> DnfFormula:
    """Substitute the gadget DNFs into an unambiguous outer DNF and multiply out.

    Positive literals take the gadget's DNF on the corresponding block,
    negative literals the negation's; contradictory products are dropped and
    duplicates removed. Width grows by a factor of at most the tree depth.
    """
    if not is_unambiguous_dnf(outer_dnf):
        raise PreconditionError("outer DNF must be unambiguous")
    pos, neg = tree_to_unambiguous_dnfs(g)
    b = g.bits
    n = outer_dnf.arity

    def block_shift(c: Conjunction, block: int) -> Conjunction:
        # gadget variable j < b sits in the x half, j >= b in the y half
        return Conjunction(
            tuple(
                (block * b + v if v < b else n * b + block * b + (v - b), p)
                for v, p in c.literals
            )
        )

    out_terms: list[Conjunction] = []
    for term in outer_dnf.terms:
        partial: list[Conjunction] = [Conjunction(())]
        for var, positive in term.literals:
            source = pos if positive else neg
            nxt: list[Conjunction] = []
            for acc in partial:
                for gterm in source.terms:
                    merged = acc.conjoin(block_shift(gterm, var))
                    if merged is not None:
                        nxt.append(merged)
            partial = nxt
        out_terms.extend(partial)
    return DnfFormula(2 * n * b, tuple(out_terms)).dedup()
