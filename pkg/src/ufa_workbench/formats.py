"""Text formats for every value the workbench reads or writes.

All writers emit canonical, byte-stable text (sorted where an order is not
semantically fixed); all parsers raise ParseError with a line location.

Formats:
  truth table   ``tt <n> <bitstring of length 2^n>``
  DNF           ``dnf <n>`` then one term per line, literals ``+i``/``-i`` (1-based);
                an empty line is the empty (constant-1) conjunction
  junta         ``junta <n>`` then lines ``num/den +i -j ...``
  certificate   ``cert <n> <d>`` then 2^n rationals, one per line, in index order
  automaton     ``nfa <states> <alphabet>`` then ``init q`` / ``acc q`` / ``trans q a r``
  matrix        CSV with a label header row and a label column
  family        ``zfamily <n> <k> <ell> <seed>`` then one n-bit mask per line
  gadget        ``gadget <b>``, the table bitstring, and optionally a decision
                tree as a parenthesized term ``(var <if0> <if1>)`` with 0/1 leaves

Variables are 1-based on disk and 0-based in memory.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction

from .automata import Nfa
from .boolfn import Conjunction, DnfFormula, RealTable, TruthTable
from .commx import CommMatrix
from .disj import SeparatingFamily, verify_family
from .errors import ParseError
from .junta import ConicalJunta, DualCertificate
from .lifting import DecisionTree, DtLeaf, DtNode, Gadget


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(token: str, where: str = "") -> Fraction:
    try:
        if "/" in token:
            num, den = token.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(token))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {token!r}: {exc}", where) from None


def _lines(text: str) -> list[str]:
    return text.split("\n")


def _header(text: str, keyword: str, argc: int) -> tuple[list[str], list[str]]:
    lines = _lines(text)
    if lines and lines[-1] == "":
        lines.pop()  # exactly one trailing newline; empty mid-file lines are data
    if not lines or not lines[0].strip():
        raise ParseError(f"missing {keyword!r} header", "line 1")
    fields = lines[0].split()
    if fields[0] != keyword:
        raise ParseError(f"expected {keyword!r} header, found {fields[0]!r}", "line 1")
    if len(fields) != argc + 1:
        raise ParseError(f"{keyword!r} header takes {argc} fields", "line 1")
    return fields[1:], lines[1:]


def _int(token: str, where: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, found {token!r}", where) from None


# truth tables ---------------------------------------------------------------

def render_truth_table(f: TruthTable) -> str:
    bits = "".join(str(v) for v in f.values)
    return f"tt {f.arity} {bits}\n" if f.arity else f"tt 0 {bits}\n"


def parse_truth_table(text: str) -> TruthTable:
    args, _ = _header(text, "tt", 2)
    n = _int(args[0], "line 1")
    bits = args[1]
    if len(bits) != 1 << n or any(c not in "01" for c in bits):
        raise ParseError(f"expected {1 << n} bits", "line 1")
    return TruthTable(n, tuple(int(c) for c in bits))


# DNF formulas ---------------------------------------------------------------

def _render_literals(c: Conjunction) -> str:
    return " ".join(("+" if p else "-") + str(v + 1) for v, p in c.literals)


def _parse_literals(line: str, arity: int, where: str) -> Conjunction:
    lits = []
    for tok in line.split():
        if len(tok) < 2 or tok[0] not in "+-":
            raise ParseError(f"literal {tok!r} must look like +i or -i", where)
        v = _int(tok[1:], where) - 1
        if not 0 <= v < arity:
            raise ParseError(f"variable {tok!r} outside 1..{arity}", where)
        lits.append((v, tok[0] == "+"))
    try:
        return Conjunction(tuple(lits))
    except ValueError as exc:
        raise ParseError(str(exc), where) from None


def render_dnf(d: DnfFormula) -> str:
    out = [f"dnf {d.arity}"]
    out.extend(_render_literals(t) for t in d.terms)
    return "\n".join(out) + "\n"


def parse_dnf(text: str) -> DnfFormula:
    args, rest = _header(text, "dnf", 1)
    n = _int(args[0], "line 1")
    terms = tuple(
        _parse_literals(line, n, f"line {i + 2}") for i, line in enumerate(rest)
    )
    return DnfFormula(n, terms)


# conical juntas -------------------------------------------------------------

def render_junta(h: ConicalJunta) -> str:
    out = [f"junta {h.arity}"]
    for w, c in h.terms:
        lits = _render_literals(c)
        out.append(f"{w.numerator}/{w.denominator}" + (f" {lits}" if lits else ""))
    return "\n".join(out) + "\n"


def parse_junta(text: str) -> ConicalJunta:
    args, rest = _header(text, "junta", 1)
    n = _int(args[0], "line 1")
    terms = []
    for i, line in enumerate(rest):
        if not line.strip():
            continue
        where = f"line {i + 2}"
        head, _, tail = line.strip().partition(" ")
        w = parse_rational(head, where)
        if w < 0:
            raise ParseError("junta weights must be nonnegative", where)
        terms.append((w, _parse_literals(tail, n, where)))
    return ConicalJunta(n, tuple(terms))


# dual certificates ----------------------------------------------------------

def render_certificate(phi: DualCertificate) -> str:
    out = [f"cert {phi.arity} {phi.degree}"]
    out.extend(format_rational(v) for v in phi.values)
    return "\n".join(out) + "\n"


def parse_certificate(text: str) -> DualCertificate:
    args, rest = _header(text, "cert", 2)
    n, d = _int(args[0], "line 1"), _int(args[1], "line 1")
    values = [t for t in (line.strip() for line in rest) if t]
    if len(values) != 1 << n:
        raise ParseError(f"expected {1 << n} values, found {len(values)}", "body")
    return DualCertificate(
        n, d, tuple(parse_rational(t, f"line {i + 2}") for i, t in enumerate(values))
    )


# automata -------------------------------------------------------------------

def render_nfa(a: Nfa) -> str:
    out = [f"nfa {a.num_states} {''.join(a.alphabet)}"]
    out.extend(f"init {q}" for q in sorted(a.initial))
    out.extend(f"acc {q}" for q in sorted(a.accepting))
    out.extend(f"trans {p} {s} {q}" for p, s, q in sorted(a.transitions))
    return "\n".join(out) + "\n"


def parse_nfa(text: str) -> Nfa:
    args, rest = _header(text, "nfa", 2)
    num, alphabet = _int(args[0], "line 1"), tuple(args[1])
    initial, accepting, transitions = set(), set(), set()
    for i, line in enumerate(rest):
        if not line.strip():
            continue
        where = f"line {i + 2}"
        fields = line.split()
        if fields[0] == "init" and len(fields) == 2:
            initial.add(_int(fields[1], where))
        elif fields[0] == "acc" and len(fields) == 2:
            accepting.add(_int(fields[1], where))
        elif fields[0] == "trans" and len(fields) == 4:
            transitions.add((_int(fields[1], where), fields[2], _int(fields[3], where)))
        else:
            raise ParseError(f"unrecognized automaton line {line!r}", where)
    try:
        return Nfa(num, alphabet, frozenset(transitions), frozenset(initial), frozenset(accepting))
    except ValueError as exc:
        raise ParseError(str(exc), "body") from None


# matrices -------------------------------------------------------------------

def render_matrix(m: CommMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(m.col_labels))
    for label, row in zip(m.row_labels, m.entries):
        writer.writerow([label] + [format_rational(v) for v in row])
    return buf.getvalue()


def parse_matrix(text: str) -> CommMatrix:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError("empty matrix file", "line 1")
    col_labels = tuple(rows[0][1:])
    row_labels, entries = [], []
    for i, row in enumerate(rows[1:]):
        where = f"line {i + 2}"
        if len(row) != len(col_labels) + 1:
            raise ParseError("row width disagrees with the header", where)
        row_labels.append(row[0])
        entries.append(tuple(parse_rational(t, where) for t in row[1:]))
    return CommMatrix(tuple(row_labels), col_labels, tuple(entries))


# separating families --------------------------------------------------------

def render_family(fam: SeparatingFamily) -> str:
    out = [f"zfamily {fam.n} {fam.k} {fam.ell} {fam.seed}"]
    for z in fam.sets:
        out.append("".join("1" if i in z else "0" for i in range(fam.n)))
    return "\n".join(out) + "\n"


def parse_family(text: str, *, verify: bool = True) -> SeparatingFamily:
    args, rest = _header(text, "zfamily", 4)
    n, k, ell, seed = (_int(a, "line 1") for a in args)
    masks = [line.strip() for line in rest if line.strip()]
    if len(masks) != ell:
        raise ParseError(f"expected {ell} masks, found {len(masks)}", "body")
    sets = []
    for i, mask in enumerate(masks):
        if len(mask) != n or any(c not in "01" for c in mask):
            raise ParseError(f"mask must be {n} bits of 0/1", f"line {i + 2}")
        sets.append(frozenset(j for j, c in enumerate(mask) if c == "1"))
    verified = verify_family(n, k, sets) if verify else False
    return SeparatingFamily(
        n=n, k=k, sets=tuple(sets), seed=seed, attempts=0, verified=verified
    )


# gadgets --------------------------------------------------------------------

def _render_tree(t: DecisionTree) -> str:
    if isinstance(t, DtLeaf):
        return str(t.value)
    return f"({t.var} {_render_tree(t.if0)} {_render_tree(t.if1)})"


def _parse_tree(tokens: list[str], pos: int, where: str) -> tuple[DecisionTree, int]:
    if pos >= len(tokens):
        raise ParseError("unexpected end of tree", where)
    tok = tokens[pos]
    if tok in ("0", "1"):
        return DtLeaf(int(tok)), pos + 1
    if tok != "(":
        raise ParseError(f"expected '(' or a leaf, found {tok!r}", where)
    var = _int(tokens[pos + 1], where)
    if0, pos = _parse_tree(tokens, pos + 2, where)
    if1, pos = _parse_tree(tokens, pos, where)
    if pos >= len(tokens) or tokens[pos] != ")":
        raise ParseError("expected ')'", where)
    return DtNode(var, if0, if1), pos + 1


def render_gadget(g: Gadget) -> str:
    bits = "".join(str(v) for v in g.table.values)
    return f"gadget {g.bits}\n{bits}\n{_render_tree(g.tree)}\n"


def parse_gadget(text: str) -> Gadget:
    args, rest = _header(text, "gadget", 1)
    b = _int(args[0], "line 1")
    rest = [line for line in rest if line.strip()]
    if not rest:
        raise ParseError("missing gadget table line", "line 2")
    bits = rest[0].strip()
    if len(bits) != 1 << (2 * b) or any(c not in "01" for c in bits):
        raise ParseError(f"expected {1 << (2 * b)} table bits", "line 2")
    table = TruthTable(2 * b, tuple(int(c) for c in bits))
    if len(rest) == 1:
        return Gadget.from_table(b, table)
    tokens = rest[1].replace("(", " ( ").replace(")", " ) ").split()
    tree, pos = _parse_tree(tokens, 0, "line 3")
    if pos != len(tokens):
        raise ParseError("trailing tokens after the tree", "line 3")
    try:
        return Gadget(b, table, tree)
    except ValueError as exc:
        raise ParseError(str(exc), "line 3") from None


# real tables ----------------------------------------------------------------

def render_real_table(f: RealTable) -> str:
    out = [f"rt {f.arity}"]
    out.extend(format_rational(v) for v in f.values)
    return "\n".join(out) + "\n"


def parse_real_table(text: str) -> RealTable:
    args, rest = _header(text, "rt", 1)
    n = _int(args[0], "line 1")
    values = [t for t in (line.strip() for line in rest) if t]
    if len(values) != 1 << n:
        raise ParseError(f"expected {1 << n} values, found {len(values)}", "body")
    return RealTable(
        n, tuple(parse_rational(t, f"line {i + 2}") for i, t in enumerate(values))
    )
