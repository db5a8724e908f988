"""Guard and task formula ASTs with parsing, evaluation, DNF and NNF.

Atoms are ``pi(i,j)``: robot ``i`` is inside labeled region ``j``.  Guards
are plain propositional formulas over these atoms; task formulas add the
temporal operators ``U``, ``R``, ``F``/``<>`` and ``G``/``[]`` but no
"next".
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnsupportedOperatorError(FormulaSyntaxError):
    pass


class DnfExplosionError(FormulaError):
    pass


@dataclass(frozen=True, order=True)
class AtomicProp:
    """Proposition "robot `robot` is inside region `region`" (1-based)."""

    robot: int
    region: int

    def __str__(self) -> str:
        return f"pi({self.robot},{self.region})"


# ---------------------------------------------------------------------------
# Propositional guards
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropFormula:
    pass


@dataclass(frozen=True)
class PTrue(PropFormula):
    pass


@dataclass(frozen=True)
class PFalse(PropFormula):
    pass


@dataclass(frozen=True)
class PAtom(PropFormula):
    atom: AtomicProp


@dataclass(frozen=True)
class PNot(PropFormula):
    child: PropFormula


@dataclass(frozen=True)
class PAnd(PropFormula):
    children: tuple[PropFormula, ...]


@dataclass(frozen=True)
class POr(PropFormula):
    children: tuple[PropFormula, ...]


# ---------------------------------------------------------------------------
# Temporal task formulas (no "next" operator)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LtlFormula:
    pass


@dataclass(frozen=True)
class LTrue(LtlFormula):
    pass


@dataclass(frozen=True)
class LAtom(LtlFormula):
    atom: AtomicProp


@dataclass(frozen=True)
class LNot(LtlFormula):
    child: LtlFormula


@dataclass(frozen=True)
class LAnd(LtlFormula):
    children: tuple[LtlFormula, ...]


@dataclass(frozen=True)
class LOr(LtlFormula):
    children: tuple[LtlFormula, ...]


@dataclass(frozen=True)
class LUntil(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class LRelease(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class LEventually(LtlFormula):
    child: LtlFormula


@dataclass(frozen=True)
class LAlways(LtlFormula):
    child: LtlFormula


# ---------------------------------------------------------------------------
# Tokenizer shared by both grammars
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<atom>pi\(\s*(?P<ri>\d+)\s*,\s*(?P<rj>\d+)\s*\))
  | (?P<true>true\b)
  | (?P<false>false\b)
  | (?P<and>&&)
  | (?P<or>\|\|)
  | (?P<not>!)
  | (?P<ev><>|F\b)
  | (?P<alw>\[\]|G\b)
  | (?P<until>U\b)
  | (?P<release>R\b)
  | (?P<next>X\b)
  | (?P<lp>\()
  | (?P<rp>\))
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "atom":
            # lastgroup reports the outermost group even with nested ones
            tokens.append(("atom", (int(m.group("ri")), int(m.group("rj"))), pos))
        elif kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser; precedence ! / F / G  >  U / R  >  &&  >  ||."""

    def __init__(self, text: str, temporal: bool,
                 n_robots: int | None, n_regions: int | None):
        self.tokens = _tokenize(text)
        self.idx = 0
        self.temporal = temporal
        self.n_robots = n_robots
        self.n_regions = n_regions

    def peek(self):
        return self.tokens[self.idx]

    def take(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind: str):
        tok = self.take()
        if tok[0] != kind:
            raise FormulaSyntaxError(f"expected {kind}, found {tok[1]!r}", tok[2])
        return tok

    def atom(self, value, pos) -> AtomicProp:
        robot, region = value
        if robot < 1 or (self.n_robots is not None and robot > self.n_robots):
            raise FormulaSyntaxError(
                f"robot index {robot} outside 1..{self.n_robots}", pos)
        if region < 1 or (self.n_regions is not None and region > self.n_regions):
            raise FormulaSyntaxError(
                f"region index {region} outside 1..{self.n_regions}", pos)
        return AtomicProp(robot, region)

    # grammar levels, lowest binding first
    def parse(self):
        f = self.or_level()
        tok = self.peek()
        if tok[0] != "eof":
            raise FormulaSyntaxError(f"unexpected trailing {tok[1]!r}", tok[2])
        return f

    def or_level(self):
        parts = [self.and_level()]
        while self.peek()[0] == "or":
            self.take()
            parts.append(self.and_level())
        if len(parts) == 1:
            return parts[0]
        return LOr(tuple(parts)) if self.temporal else POr(tuple(parts))

    def and_level(self):
        parts = [self.until_level()]
        while self.peek()[0] == "and":
            self.take()
            parts.append(self.until_level())
        if len(parts) == 1:
            return parts[0]
        return LAnd(tuple(parts)) if self.temporal else PAnd(tuple(parts))

    def until_level(self):
        left = self.unary()
        tok = self.peek()
        if tok[0] in ("until", "release"):
            if not self.temporal:
                raise FormulaSyntaxError(
                    f"temporal operator {tok[1]!r} in a propositional guard", tok[2])
            self.take()
            right = self.until_level()  # right associative
            return LUntil(left, right) if tok[0] == "until" else LRelease(left, right)
        return left

    def unary(self):
        kind, value, pos = self.peek()
        if kind == "next":
            raise UnsupportedOperatorError(
                f"unsupported operator {value!r}: the next operator is excluded", pos)
        if kind == "not":
            self.take()
            child = self.unary()
            return LNot(child) if self.temporal else PNot(child)
        if kind in ("ev", "alw"):
            if not self.temporal:
                raise FormulaSyntaxError(
                    f"temporal operator {value!r} in a propositional guard", pos)
            self.take()
            child = self.unary()
            return LEventually(child) if kind == "ev" else LAlways(child)
        return self.primary()

    def primary(self):
        kind, value, pos = self.take()
        if kind == "atom":
            a = self.atom(value, pos)
            return LAtom(a) if self.temporal else PAtom(a)
        if kind == "true":
            return LTrue() if self.temporal else PTrue()
        if kind == "false":
            # the temporal AST has no false node; !true is equivalent
            return LNot(LTrue()) if self.temporal else PFalse()
        if kind == "lp":
            f = self.or_level()
            self.expect("rp")
            return f
        raise FormulaSyntaxError(f"unexpected token {value!r}", pos)


def parse_prop(text: str, n_robots: int | None = None,
               n_regions: int | None = None) -> PropFormula:
    """Parse a propositional guard over ``pi(i,j)`` atoms."""
    return _Parser(text, temporal=False,
                   n_robots=n_robots, n_regions=n_regions).parse()


def parse_ltl(text: str, n_robots: int | None = None,
              n_regions: int | None = None) -> LtlFormula:
    """Parse a task formula; the next operator is rejected."""
    return _Parser(text, temporal=True,
                   n_robots=n_robots, n_regions=n_regions).parse()


# ---------------------------------------------------------------------------
# Printing (inverse of the parser: parse(format(f)) == f)
# ---------------------------------------------------------------------------

def _wrap(text: str, need: bool) -> str:
    return f"({text})" if need else text


def format_prop(f: PropFormula) -> str:
    if isinstance(f, PTrue):
        return "true"
    if isinstance(f, PFalse):
        return "false"
    if isinstance(f, PAtom):
        return str(f.atom)
    if isinstance(f, PNot):
        return "!" + _wrap(format_prop(f.child),
                           isinstance(f.child, (PAnd, POr)))
    if isinstance(f, PAnd):
        return " && ".join(
            _wrap(format_prop(c), isinstance(c, (PAnd, POr))) for c in f.children)
    if isinstance(f, POr):
        return " || ".join(
            _wrap(format_prop(c), isinstance(c, POr)) for c in f.children)
    raise TypeError(f"not a propositional formula: {f!r}")


_BINARY_L = (LAnd, LOr, LUntil, LRelease)


def format_ltl(f: LtlFormula) -> str:
    if isinstance(f, LTrue):
        return "true"
    if isinstance(f, LAtom):
        return str(f.atom)
    if isinstance(f, LNot):
        return "!" + _wrap(format_ltl(f.child), isinstance(f.child, _BINARY_L))
    if isinstance(f, LEventually):
        return "F " + _wrap(format_ltl(f.child), isinstance(f.child, _BINARY_L))
    if isinstance(f, LAlways):
        return "G " + _wrap(format_ltl(f.child), isinstance(f.child, _BINARY_L))
    if isinstance(f, (LUntil, LRelease)):
        op = " U " if isinstance(f, LUntil) else " R "
        left = _wrap(format_ltl(f.left),
                     isinstance(f.left, _BINARY_L))
        right = _wrap(format_ltl(f.right), isinstance(f.right, (LAnd, LOr)))
        return left + op + right
    if isinstance(f, LAnd):
        return " && ".join(
            _wrap(format_ltl(c), isinstance(c, (LAnd, LOr))) for c in f.children)
    if isinstance(f, LOr):
        return " || ".join(
            _wrap(format_ltl(c), isinstance(c, LOr)) for c in f.children)
    raise TypeError(f"not a temporal formula: {f!r}")


# ---------------------------------------------------------------------------
# Evaluation and DNF
# ---------------------------------------------------------------------------

def eval_prop(f: PropFormula, labels: frozenset[AtomicProp] | set[AtomicProp]) -> bool:
    """Standard Boolean semantics; an atom holds iff it is in ``labels``."""
    if isinstance(f, PTrue):
        return True
    if isinstance(f, PFalse):
        return False
    if isinstance(f, PAtom):
        return f.atom in labels
    if isinstance(f, PNot):
        return not eval_prop(f.child, labels)
    if isinstance(f, PAnd):
        return all(eval_prop(c, labels) for c in f.children)
    if isinstance(f, POr):
        return any(eval_prop(c, labels) for c in f.children)
    raise TypeError(f"not a propositional formula: {f!r}")


def prop_atoms(f: PropFormula) -> set[AtomicProp]:
    if isinstance(f, PAtom):
        return {f.atom}
    if isinstance(f, PNot):
        return prop_atoms(f.child)
    if isinstance(f, (PAnd, POr)):
        out: set[AtomicProp] = set()
        for c in f.children:
            out |= prop_atoms(c)
        return out
    return set()


def ltl_atoms(f: LtlFormula) -> set[AtomicProp]:
    if isinstance(f, LAtom):
        return {f.atom}
    if isinstance(f, LNot):
        return ltl_atoms(f.child)
    if isinstance(f, (LEventually, LAlways)):
        return ltl_atoms(f.child)
    if isinstance(f, (LUntil, LRelease)):
        return ltl_atoms(f.left) | ltl_atoms(f.right)
    if isinstance(f, (LAnd, LOr)):
        out: set[AtomicProp] = set()
        for c in f.children:
            out |= ltl_atoms(c)
        return out
    return set()


@dataclass(frozen=True)
class DnfClause:
    """Conjunction of positive and negated atoms.

    A clause with an atom on both sides is unsatisfiable and is never
    constructed by :func:`to_dnf`.
    """

    positives: frozenset[AtomicProp]
    negatives: frozenset[AtomicProp]

    def __post_init__(self):
        if self.positives & self.negatives:
            raise ValueError("clause mentions an atom both positively and negatively")

    def holds(self, labels: frozenset[AtomicProp] | set[AtomicProp]) -> bool:
        return self.positives <= labels and not (self.negatives & labels)


DEFAULT_DNF_BOUND = 4096

_EMPTY: frozenset[AtomicProp] = frozenset()


def _dedupe(clauses: list[tuple[frozenset, frozenset]]):
    seen = {}
    for c in clauses:
        seen.setdefault(c, None)
    return list(seen)


def _dnf(f: PropFormula, neg: bool, bound: int) -> list[tuple[frozenset, frozenset]]:
    if isinstance(f, PTrue):
        f = PFalse() if neg else f
    elif isinstance(f, PFalse):
        f = PTrue() if neg else f
    if isinstance(f, PTrue):
        return [(_EMPTY, _EMPTY)]
    if isinstance(f, PFalse):
        return []
    if isinstance(f, PAtom):
        return [(_EMPTY, frozenset([f.atom]))] if neg else [(frozenset([f.atom]), _EMPTY)]
    if isinstance(f, PNot):
        return _dnf(f.child, not neg, bound)
    # under negation And/Or swap by De Morgan
    is_or = isinstance(f, POr) ^ neg
    if is_or:
        out: list[tuple[frozenset, frozenset]] = []
        for c in f.children:
            out.extend(_dnf(c, neg, bound))
            if len(out) > bound:
                raise DnfExplosionError(
                    f"DNF clause count exceeded the bound of {bound}")
        return _dedupe(out)
    # conjunction: distribute
    acc = [(_EMPTY, _EMPTY)]
    for c in f.children:
        part = _dnf(c, neg, bound)
        merged = []
        for pos_a, neg_a in acc:
            for pos_b, neg_b in part:
                pos = pos_a | pos_b
                negs = neg_a | neg_b
                if pos & negs:
                    continue  # p && !p
                merged.append((pos, negs))
        if len(merged) > bound:
            raise DnfExplosionError(
                f"DNF clause count exceeded the bound of {bound}")
        acc = _dedupe(merged)
    return acc


def to_dnf(f: PropFormula, max_clauses: int = DEFAULT_DNF_BOUND) -> list[DnfClause]:
    """Disjunctive normal form with unsatisfiable clauses dropped.

    ``false`` yields an empty list; ``true`` a single empty clause.  Raises
    :class:`DnfExplosionError` when the clause count exceeds ``max_clauses``.
    """
    return [DnfClause(p, n) for p, n in _dnf(f, False, max_clauses)]


def clause_formula(clause: DnfClause) -> PropFormula:
    lits: list[PropFormula] = [PAtom(a) for a in sorted(clause.positives)]
    lits += [PNot(PAtom(a)) for a in sorted(clause.negatives)]
    if not lits:
        return PTrue()
    if len(lits) == 1:
        return lits[0]
    return PAnd(tuple(lits))


def dnf_formula(clauses: list[DnfClause]) -> PropFormula:
    if not clauses:
        return PFalse()
    parts = [clause_formula(c) for c in clauses]
    if len(parts) == 1:
        return parts[0]
    return POr(tuple(parts))


# ---------------------------------------------------------------------------
# Negation normal form for task formulas
# ---------------------------------------------------------------------------

def nnf(f: LtlFormula) -> LtlFormula:
    """Push negations down to atoms using the standard dualities."""
    if isinstance(f, (LTrue, LAtom)):
        return f
    if isinstance(f, LNot):
        return _nnf_neg(f.child)
    if isinstance(f, LAnd):
        return LAnd(tuple(nnf(c) for c in f.children))
    if isinstance(f, LOr):
        return LOr(tuple(nnf(c) for c in f.children))
    if isinstance(f, LUntil):
        return LUntil(nnf(f.left), nnf(f.right))
    if isinstance(f, LRelease):
        return LRelease(nnf(f.left), nnf(f.right))
    if isinstance(f, LEventually):
        return LEventually(nnf(f.child))
    if isinstance(f, LAlways):
        return LAlways(nnf(f.child))
    raise TypeError(f"not a temporal formula: {f!r}")


def _nnf_neg(f: LtlFormula) -> LtlFormula:
    if isinstance(f, LTrue):
        return LNot(f)  # the falsum; there is no dedicated node
    if isinstance(f, LAtom):
        return LNot(f)
    if isinstance(f, LNot):
        return nnf(f.child)
    if isinstance(f, LAnd):
        return LOr(tuple(_nnf_neg(c) for c in f.children))
    if isinstance(f, LOr):
        return LAnd(tuple(_nnf_neg(c) for c in f.children))
    if isinstance(f, LUntil):
        return LRelease(_nnf_neg(f.left), _nnf_neg(f.right))
    if isinstance(f, LRelease):
        return LUntil(_nnf_neg(f.left), _nnf_neg(f.right))
    if isinstance(f, LEventually):
        return LAlways(_nnf_neg(f.child))
    if isinstance(f, LAlways):
        return LEventually(_nnf_neg(f.child))
    raise TypeError(f"not a temporal formula: {f!r}")
