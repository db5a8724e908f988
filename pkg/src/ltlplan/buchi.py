"""Buchi automata over robot-region propositions.

Provides a tableau translation from task formulas, ingestion and emission
of a HOA v1 subset, workspace-aware transition pruning, hop distances in
the pruned automaton, and lasso-word acceptance (the verification oracle).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .formula import (
    AtomicProp,
    LAlways,
    LAnd,
    LAtom,
    LEventually,
    LNot,
    LOr,
    LRelease,
    LtlFormula,
    LTrue,
    LUntil,
    PAnd,
    PAtom,
    PFalse,
    PNot,
    POr,
    PropFormula,
    PTrue,
    DnfClause,
    dnf_formula,
    eval_prop,
    nnf,
    parse_prop,
    prop_atoms,
    to_dnf,
)


class AutomatonError(ValueError):
    pass


class StateExplosionError(AutomatonError):
    pass


class HoaError(AutomatonError):
    pass


DEFAULT_STATE_CAP = 100_000


class Nba:
    """Nondeterministic Buchi automaton with guarded transitions.

    Guards of transitions sharing the same (src, dst) pair are merged by
    disjunction so each pair appears at most once.  Immutable after
    construction; internal evaluation caches are the only mutable state and
    are append-only.
    """

    def __init__(self, n_states: int, initial, accepting, transitions):
        self.n_states = n_states
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        for q in self.initial | self.accepting:
            if not 0 <= q < n_states:
                raise AutomatonError(f"state {q} out of range")
        merged: dict[tuple[int, int], PropFormula] = {}
        for src, guard, dst in transitions:
            if not (0 <= src < n_states and 0 <= dst < n_states):
                raise AutomatonError(f"transition ({src},{dst}) out of range")
            key = (src, dst)
            if key in merged:
                prev = merged[key]
                parts = prev.children if isinstance(prev, POr) else (prev,)
                merged[key] = POr(parts + (guard,))
            else:
                merged[key] = guard
        out: list[list[tuple[int, PropFormula]]] = [[] for _ in range(n_states)]
        for (src, dst) in sorted(merged):
            out[src].append((dst, merged[(src, dst)]))
        self._out = [tuple(edges) for edges in out]
        self._clauses: list[tuple[tuple[int, tuple[DnfClause, ...]], ...] | None] = \
            [None] * n_states

    def out(self, q: int) -> tuple[tuple[int, PropFormula], ...]:
        return self._out[q]

    def transitions(self):
        for src in range(self.n_states):
            for dst, guard in self._out[src]:
                yield src, guard, dst

    @property
    def n_edges(self) -> int:
        return sum(len(e) for e in self._out)

    def _out_clauses(self, q: int):
        cached = self._clauses[q]
        if cached is None:
            cached = tuple((dst, tuple(to_dnf(g))) for dst, g in self._out[q])
            self._clauses[q] = cached
        return cached

    def step(self, q: int, labels) -> frozenset[int]:
        """States reachable from q by one transition enabled under ``labels``."""
        labels = frozenset(labels)
        nxt = []
        for dst, clauses in self._out_clauses(q):
            if any(c.holds(labels) for c in clauses):
                nxt.append(dst)
        return frozenset(nxt)


def buchi_step(nba: Nba, q: int, labels) -> frozenset[int]:
    return nba.step(q, labels)


# ---------------------------------------------------------------------------
# Tableau translation
# ---------------------------------------------------------------------------

_FALSUM = LNot(LTrue())


def _is_literal(f: LtlFormula) -> bool:
    return isinstance(f, LAtom) or (isinstance(f, LNot) and isinstance(f.child, LAtom))


def _negate_literal(f: LtlFormula) -> LtlFormula:
    return f.child if isinstance(f, LNot) else LNot(f)


def _eventualities(f: LtlFormula, seen: list[LtlFormula]):
    """Until-type subformulas in first-seen order; one acceptance set each."""
    if isinstance(f, (LUntil, LEventually)) and f not in seen:
        seen.append(f)
    if isinstance(f, (LAnd, LOr)):
        for c in f.children:
            _eventualities(c, seen)
    elif isinstance(f, (LUntil, LRelease)):
        _eventualities(f.left, seen)
        _eventualities(f.right, seen)
    elif isinstance(f, (LEventually, LAlways, LNot)):
        _eventualities(f.child, seen)
    return seen


class _Node:
    __slots__ = ("incoming", "new", "old", "next")

    def __init__(self, incoming, new, old, nxt):
        self.incoming = incoming      # set of node ids (-1 marks initial)
        self.new = new                # insertion-ordered dict used as a set
        self.old = old                # set
        self.next = nxt               # set

    def clone_with(self, add_new=(), add_next=()):
        new = dict(self.new)
        for f in add_new:
            new.setdefault(f, None)
        nxt = set(self.next)
        nxt.update(add_next)
        return _Node(set(self.incoming), new, set(self.old), nxt)


def _expand(formula: LtlFormula, cap: int):
    """GPVW-style cover expansion producing the generalized automaton graph."""
    done: list[tuple[frozenset, frozenset, set]] = []  # (old, next, incoming)
    index: dict[tuple[frozenset, frozenset], int] = {}
    root = _Node({-1}, {formula: None}, set(), set())
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.new:
            key = (frozenset(node.old), frozenset(node.next))
            if key in index:
                done[index[key]][2].update(node.incoming)
                continue
            if len(done) >= cap:
                raise StateExplosionError(
                    f"tableau node count exceeded the cap of {cap}")
            nid = len(done)
            index[key] = nid
            done.append((key[0], key[1], set(node.incoming)))
            stack.append(_Node({nid}, dict.fromkeys(node.next), set(), set()))
            continue
        eta = next(iter(node.new))
        del node.new[eta]
        if eta in node.old:
            stack.append(node)
            continue
        if isinstance(eta, LTrue):
            stack.append(node)
            continue
        if eta == _FALSUM:
            continue  # contradiction, node dies
        if _is_literal(eta):
            if _negate_literal(eta) in node.old:
                continue
            node.old.add(eta)
            stack.append(node)
            continue
        node.old.add(eta)
        if isinstance(eta, LAnd):
            for c in eta.children:
                node.new.setdefault(c, None)
            stack.append(node)
        elif isinstance(eta, LOr):
            for c in reversed(eta.children):
                stack.append(node.clone_with(add_new=(c,)))
        elif isinstance(eta, LUntil):
            stack.append(node.clone_with(add_new=(eta.left,), add_next=(eta,)))
            stack.append(node.clone_with(add_new=(eta.right,)))
        elif isinstance(eta, LEventually):
            stack.append(node.clone_with(add_next=(eta,)))
            stack.append(node.clone_with(add_new=(eta.child,)))
        elif isinstance(eta, LRelease):
            stack.append(node.clone_with(add_new=(eta.right,), add_next=(eta,)))
            stack.append(node.clone_with(add_new=(eta.left, eta.right)))
        elif isinstance(eta, LAlways):
            node.new.setdefault(eta.child, None)
            node.next.add(eta)
            stack.append(node)
        else:
            raise TypeError(f"unexpected formula in tableau: {eta!r}")
    return done


def _literal_key(lit: LtlFormula):
    neg = isinstance(lit, LNot)
    atom = lit.child.atom if neg else lit.atom
    return (atom.robot, atom.region, neg)


def _node_guard(old: frozenset) -> PropFormula:
    lits = sorted((f for f in old if _is_literal(f)), key=_literal_key)
    parts: list[PropFormula] = []
    for lit in lits:
        if isinstance(lit, LNot):
            parts.append(PNot(PAtom(lit.child.atom)))
        else:
            parts.append(PAtom(lit.atom))
    if not parts:
        return PTrue()
    if len(parts) == 1:
        return parts[0]
    return PAnd(tuple(parts))


def _guard_key(guard: PropFormula):
    return frozenset((c.positives, c.negatives) for c in to_dnf(guard))


def _sccs(n: int, adj) -> list[int]:
    """Iterative Tarjan; returns a component id per state."""
    index = [-1] * n
    low = [0] * n
    comp = [-1] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            children = adj[v]
            while pi < len(children):
                w = children[pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return comp


def _trim(n: int, initial, accepting, edges):
    """Keep states reachable from the start and able to reach an accepting cycle."""
    fwd = [[] for _ in range(n)]
    bwd = [[] for _ in range(n)]
    self_loop = [False] * n
    for src, _, dst in edges:
        fwd[src].append(dst)
        bwd[dst].append(src)
        if src == dst:
            self_loop[src] = True

    def closure(seeds, adj):
        seen = set(seeds)
        frontier = list(seeds)
        while frontier:
            u = frontier.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        return seen

    reach = closure(sorted(initial), fwd)
    comp = _sccs(n, fwd)
    comp_size: dict[int, int] = {}
    for q in range(n):
        comp_size[comp[q]] = comp_size.get(comp[q], 0) + 1
    lively = {qa for qa in accepting
              if qa in reach and (comp_size[comp[qa]] > 1 or self_loop[qa])}
    good = reach & closure(sorted(lively), bwd)
    keep = sorted(good)
    remap = {q: i for i, q in enumerate(keep)}
    new_edges = [(remap[s], g, remap[d]) for s, g, d in edges
                 if s in good and d in good]
    return (len(keep),
            {remap[q] for q in initial if q in good},
            {remap[q] for q in accepting if q in good},
            new_edges)


def _bisim_reduce(n: int, initial, accepting, edges):
    """Quotient by the coarsest partition with identical guarded successors."""
    key_cache: dict[int, frozenset] = {}

    def cached_key(g):
        k = key_cache.get(id(g))
        if k is None:
            k = _guard_key(g)
            key_cache[id(g)] = k
        return k

    out = [[] for _ in range(n)]
    for src, g, dst in edges:
        out[src].append((cached_key(g), g, dst))
    block = [1 if q in accepting else 0 for q in range(n)]
    while True:
        sigs = {}
        new_block = [0] * n
        for q in range(n):
            sig = (block[q],
                   frozenset((gk, block[d]) for gk, _, d in out[q]))
            if sig not in sigs:
                sigs[sig] = len(sigs)
            new_block[q] = sigs[sig]
        if new_block == block:
            break
        block = new_block
    n_classes = len(set(block))
    new_edges = {}
    for src, g, dst in edges:
        key = (block[src], block[dst], cached_key(g))
        new_edges.setdefault(key, (block[src], g, block[dst]))
    return (n_classes,
            {block[q] for q in initial},
            {block[q] for q in accepting},
            sorted(new_edges.values(), key=lambda e: (e[0], e[2])))


def _merge_initial(n: int, initial, accepting, edges):
    """Replace multiple entry states by one fresh state with their edges."""
    if len(initial) <= 1:
        return n, initial, accepting, edges
    iota = n
    new_edges = list(edges)
    for src, g, dst in edges:
        if src in initial:
            new_edges.append((iota, g, dst))
    return n + 1, {iota}, set(accepting), new_edges


def ltl_to_nba(f: LtlFormula, max_states: int = DEFAULT_STATE_CAP) -> Nba:
    """Translate a next-free task formula into an equivalent NBA.

    Tableau expansion on the negation normal form yields a generalized
    automaton (one acceptance set per until/eventually subformula), which a
    counter construction then collapses to a single accepting set.  State
    counts are whatever the construction produces; only the language is
    contractual.
    """
    g = nnf(f)
    nodes = _expand(g, max_states)
    n = len(nodes)
    initial = {i for i, (_, _, inc) in enumerate(nodes) if -1 in inc}
    guard_lits = [frozenset(x for x in old if _is_literal(x))
                  for old, _, _ in nodes]
    succ: list[list[int]] = [[] for _ in range(n)]
    for i, (_, _, inc) in enumerate(nodes):
        for src in sorted(inc):
            if src >= 0:
                succ[src].append(i)

    evts = _eventualities(g, [])
    acc_vec = []
    for i, (old, _, _) in enumerate(nodes):
        vec = tuple(
            (u not in old) or ((u.right if isinstance(u, LUntil) else u.child) in old)
            for u in evts)
        acc_vec.append(vec)

    # quotient the generalized automaton by identical (guard, acceptance,
    # successor classes); guards sit on source states so this is cheap
    block = list(range(n))
    sig0 = {}
    for q in range(n):
        s = (guard_lits[q], acc_vec[q])
        if s not in sig0:
            sig0[s] = len(sig0)
        block[q] = sig0[s]
    while True:
        sigs = {}
        new_block = [0] * n
        for q in range(n):
            s = (block[q], frozenset(block[d] for d in succ[q]))
            if s not in sigs:
                sigs[s] = len(sigs)
            new_block[q] = sigs[s]
        if new_block == block:
            break
        block = new_block
    n_c = len(set(block))
    rep = [0] * n_c
    for q in range(n - 1, -1, -1):
        rep[block[q]] = q
    guards = [_node_guard(guard_lits[rep[c]]) for c in range(n_c)]
    edges = []
    seen_edges = set()
    for q in range(n):
        for d in succ[q]:
            key = (block[q], block[d])
            if key not in seen_edges:
                seen_edges.add(key)
                edges.append((block[q], guards[block[q]], block[d]))
    initial = {block[q] for q in initial}
    n = n_c
    acc_sets = []
    for k, _ in enumerate(evts):
        acc_sets.append(frozenset(c for c in range(n_c) if acc_vec[rep[c]][k]))

    # redundant set removal: supersets of another set are implied
    acc_sets = sorted(set(acc_sets), key=lambda s: (len(s), sorted(s)))
    full = frozenset(range(n))
    acc_sets = [s for s in acc_sets if s != full]
    minimal = []
    for s in acc_sets:
        if not any(t < s for t in acc_sets if t is not s):
            if not any(t == s for t in minimal):
                minimal.append(s)
    acc_sets = minimal

    if not acc_sets:
        accepting = set(range(n))
        n2, init2, acc2, edges2 = n, initial, accepting, edges
    else:
        m = len(acc_sets)
        pair_ids: dict[tuple[int, int], int] = {}
        pair_edges = []
        stack = [(q, 0) for q in sorted(initial)]
        for p in stack:
            pair_ids[p] = len(pair_ids)
        adjacency = [[] for _ in range(n)]
        for src, guard, dst in edges:
            adjacency[src].append((guard, dst))
        while stack:
            q, c = stack.pop()
            src_id = pair_ids[(q, c)]
            c_next = (c + 1) % m if q in acc_sets[c] else c
            for guard, dst in adjacency[q]:
                key = (dst, c_next)
                if key not in pair_ids:
                    if len(pair_ids) >= max_states:
                        raise StateExplosionError(
                            f"automaton state count exceeded the cap of {max_states}")
                    pair_ids[key] = len(pair_ids)
                    stack.append(key)
                pair_edges.append((src_id, guard, pair_ids[key]))
        n2 = len(pair_ids)
        init2 = {pair_ids[(q, 0)] for q in initial if (q, 0) in pair_ids}
        acc2 = {i for (q, c), i in pair_ids.items() if c == 0 and q in acc_sets[0]}
        edges2 = pair_edges

    n3, init3, acc3, edges3 = _trim(n2, init2, acc2, edges2)
    n4, init4, acc4, edges4 = _bisim_reduce(n3, init3, acc3, edges3)
    n5, init5, acc5, edges5 = _trim(n4, init4, acc4, edges4)
    return Nba(n5, init5, acc5, edges5)


# ---------------------------------------------------------------------------
# HOA v1 subset
# ---------------------------------------------------------------------------

_ACCEPTANCE_RE = re.compile(r"1\s+Inf\s*\(\s*0\s*\)\s*$")


def _parse_label_expr(text: str, n_ap: int) -> PropFormula:
    tokens = re.findall(r"\d+|[!&|()tf]", text)
    if "".join(tokens).replace(" ", "") != text.replace(" ", ""):
        raise HoaError(f"malformed label expression {text!r}")
    idx = 0

    def peek():
        return tokens[idx] if idx < len(tokens) else None

    def take():
        nonlocal idx
        t = tokens[idx]
        idx += 1
        return t

    def or_level():
        parts = [and_level()]
        while peek() == "|":
            take()
            parts.append(and_level())
        return parts[0] if len(parts) == 1 else POr(tuple(parts))

    def and_level():
        parts = [unary()]
        while peek() == "&":
            take()
            parts.append(unary())
        return parts[0] if len(parts) == 1 else PAnd(tuple(parts))

    def unary():
        t = peek()
        if t is None:
            raise HoaError(f"truncated label expression {text!r}")
        if t == "!":
            take()
            return PNot(unary())
        if t == "(":
            take()
            f = or_level()
            if take() != ")":
                raise HoaError(f"unbalanced parentheses in {text!r}")
            return f
        if t == "t":
            take()
            return PTrue()
        if t == "f":
            take()
            return PFalse()
        if t.isdigit():
            take()
            k = int(t)
            if k >= n_ap:
                raise HoaError(f"AP index {k} out of range in {text!r}")
            return PAtom(AtomicProp(-1, k))  # placeholder index, resolved below
        raise HoaError(f"unexpected token {t!r} in label expression")

    f = or_level()
    if idx != len(tokens):
        raise HoaError(f"trailing tokens in label expression {text!r}")
    return f


def _substitute_aps(f: PropFormula, atoms: list[AtomicProp]) -> PropFormula:
    if isinstance(f, PAtom):
        return PAtom(atoms[f.atom.region])
    if isinstance(f, PNot):
        return PNot(_substitute_aps(f.child, atoms))
    if isinstance(f, PAnd):
        return PAnd(tuple(_substitute_aps(c, atoms) for c in f.children))
    if isinstance(f, POr):
        return POr(tuple(_substitute_aps(c, atoms) for c in f.children))
    return f


def parse_hoa(text: str, ap_map: dict[str, AtomicProp] | None = None) -> Nba:
    """Parse a HOA v1 automaton with plain Buchi acceptance.

    Supported subset: ``States:``/``Start:``/``AP:`` headers, acceptance
    ``1 Inf(0)`` on states, and explicitly labeled edges.  AP names are
    resolved through ``ap_map`` or, failing that, parsed as ``pi(i,j)``.
    """
    if "--BODY--" not in text or "--END--" not in text:
        raise HoaError("missing --BODY--/--END-- markers")
    header_text, rest = text.split("--BODY--", 1)
    body_text = rest.split("--END--", 1)[0]

    lines = [ln.strip() for ln in header_text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("HOA:"):
        raise HoaError("document does not start with a HOA: header")
    if lines[0].split(":", 1)[1].strip() != "v1":
        raise HoaError("only HOA v1 is supported")

    n_states = None
    starts: list[int] = []
    ap_names: list[str] | None = None
    acceptance_seen = False
    for ln in lines[1:]:
        if ":" not in ln:
            raise HoaError(f"malformed header line {ln!r}")
        key, val = ln.split(":", 1)
        key = key.strip()
        val = val.strip()
        if key == "States":
            n_states = int(val)
        elif key == "Start":
            if not re.fullmatch(r"\d+", val):
                raise HoaError(f"unsupported Start: specification {val!r}")
            starts.append(int(val))
        elif key == "AP":
            parts = re.findall(r'"((?:[^"\\]|\\.)*)"', val)
            count = int(val.split(None, 1)[0])
            if count != len(parts):
                raise HoaError("AP count does not match the number of names")
            ap_names = parts
        elif key == "acc-name":
            if val.split()[0] != "Buchi":
                raise HoaError(f"unsupported acceptance {val!r}")
        elif key == "Acceptance":
            if not _ACCEPTANCE_RE.match(val):
                raise HoaError(f"unsupported acceptance condition {val!r}")
            acceptance_seen = True
        elif key in ("name", "tool", "properties", "owner"):
            continue
        else:
            raise HoaError(f"unsupported header {key!r}")
    if n_states is None:
        raise HoaError("missing States: header")
    if not acceptance_seen:
        raise HoaError("missing Acceptance: header")
    if not starts:
        raise HoaError("missing Start: header")
    ap_names = ap_names or []

    atoms = []
    for name in ap_names:
        if ap_map is not None and name in ap_map:
            atoms.append(ap_map[name])
            continue
        try:
            parsed = parse_prop(name)
        except Exception:
            parsed = None
        if not isinstance(parsed, PAtom):
            raise HoaError(f"AP name {name!r} has no mapping to a pi(i,j) atom")
        atoms.append(parsed.atom)

    accepting: set[int] = set()
    transitions: list[tuple[int, PropFormula, int]] = []
    current = None
    for raw in body_text.splitlines():
        ln = raw.split("/*")[0].strip()
        if not ln:
            continue
        if ln.startswith("State:"):
            m = re.fullmatch(
                r"State:\s*(\d+)\s*(?:\"[^\"]*\")?\s*(?:\{([\d\s]+)\})?", ln)
            if not m:
                raise HoaError(f"malformed state line {ln!r}")
            current = int(m.group(1))
            if current >= n_states:
                raise HoaError(f"state {current} out of range")
            if m.group(2) is not None:
                sets = m.group(2).split()
                if sets != ["0"]:
                    raise HoaError(f"unsupported acceptance sets {sets} on a state")
                accepting.add(current)
            continue
        m = re.fullmatch(r"\[(?P<label>[^\]]*)\]\s*(?P<dst>\d+)\s*(?P<acc>\{[^}]*\})?", ln)
        if not m:
            raise HoaError(f"malformed edge line {ln!r}")
        if current is None:
            raise HoaError("edge line before any State: line")
        if m.group("acc"):
            raise HoaError("transition-based acceptance is not supported")
        dst = int(m.group("dst"))
        if dst >= n_states:
            raise HoaError(f"edge target {dst} out of range")
        guard = _parse_label_expr(m.group("label"), len(atoms))
        guard = _substitute_aps(guard, atoms)
        transitions.append((current, guard, dst))

    return Nba(n_states, starts, accepting, transitions)


def _hoa_expr(f: PropFormula, index: dict[AtomicProp, int]) -> str:
    def go(g, parent_or: bool) -> str:
        if isinstance(g, PTrue):
            return "t"
        if isinstance(g, PFalse):
            return "f"
        if isinstance(g, PAtom):
            return str(index[g.atom])
        if isinstance(g, PNot):
            inner = go(g.child, False)
            if isinstance(g.child, (PAnd, POr)):
                inner = f"({inner})"
            return "!" + inner
        if isinstance(g, PAnd):
            parts = [go(c, False) for c in g.children]
            parts = [f"({p})" if isinstance(c, (PAnd, POr)) else p
                     for p, c in zip(parts, g.children)]
            return "&".join(parts)
        if isinstance(g, POr):
            parts = [go(c, True) for c in g.children]
            parts = [f"({p})" if isinstance(c, POr) else p
                     for p, c in zip(parts, g.children)]
            return "|".join(parts)
        raise TypeError(g)

    return go(f, False)


def to_hoa(nba: Nba) -> str:
    """Emit the automaton in the HOA v1 subset understood by parse_hoa."""
    atoms = sorted({a for _, g, _ in nba.transitions() for a in prop_atoms(g)})
    index = {a: i for i, a in enumerate(atoms)}
    lines = ["HOA: v1", f"States: {nba.n_states}"]
    for q in sorted(nba.initial):
        lines.append(f"Start: {q}")
    ap_line = f"AP: {len(atoms)}"
    for a in atoms:
        ap_line += f' "{a}"'
    lines.append(ap_line)
    lines.append("acc-name: Buchi")
    lines.append("Acceptance: 1 Inf(0)")
    lines.append("properties: trans-labels explicit-labels state-acc")
    lines.append("--BODY--")
    for q in range(nba.n_states):
        mark = " {0}" if q in nba.accepting else ""
        lines.append(f"State: {q}{mark}")
        for dst, guard in nba.out(q):
            lines.append(f"[{_hoa_expr(guard, index)}] {dst}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Workspace-aware pruning
# ---------------------------------------------------------------------------

def _clause_feasible(clause: DnfClause, disjoint) -> bool:
    by_robot: dict[int, list[int]] = {}
    for a in clause.positives:
        by_robot.setdefault(a.robot, []).append(a.region)
    for regions in by_robot.values():
        for i, rj in enumerate(regions):
            for rk in regions[i + 1:]:
                if rj != rk and disjoint[rj - 1][rk - 1]:
                    return False
    return True


def prune(nba: Nba, n_robots: int, disjoint) -> Nba:
    """Drop guard clauses that put one robot in two disjoint regions at once.

    ``disjoint[j-1][k-1]`` must be true iff the closures of regions j and k
    do not intersect.  Transitions whose guard loses every clause are
    removed.
    """
    transitions = []
    for src, guard, dst in nba.transitions():
        feasible = [c for c in to_dnf(guard) if _clause_feasible(c, disjoint)]
        if not feasible:
            continue
        transitions.append((src, dnf_formula(feasible), dst))
    return Nba(nba.n_states, nba.initial, nba.accepting, transitions)


def prune_multi_subformula(nba: Nba, subformulas: list[PropFormula]) -> Nba:
    """Remove transitions that need two or more subformula conjunctions at once.

    Each subformula must be a conjunction of positive atoms.  A transition
    survives if at least one of its guard clauses requires at most one of
    the given conjunctions to hold.
    """
    xi_sets = []
    for xi in subformulas:
        clauses = to_dnf(xi)
        if len(clauses) != 1 or clauses[0].negatives:
            raise AutomatonError(
                "subformulas must be conjunctions of positive atoms")
        xi_sets.append(clauses[0].positives)
    transitions = []
    for src, guard, dst in nba.transitions():
        keep = False
        for clause in to_dnf(guard):
            required = sum(1 for xs in xi_sets if xs <= clause.positives)
            if required < 2:
                keep = True
                break
        if keep:
            transitions.append((src, guard, dst))
    return Nba(nba.n_states, nba.initial, nba.accepting, transitions)


# ---------------------------------------------------------------------------
# Hop distances and feasible accepting states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceTable:
    """Hop counts between automaton states, plus shortest-cycle lengths.

    ``rho[q][q2]`` is the minimum number of transitions with satisfiable
    guards leading from q to q2 (0 on the diagonal, inf when unreachable);
    ``cycle[q]`` is the length of the shortest nonempty cycle through q.
    """

    rho: tuple[tuple[float, ...], ...]
    cycle: tuple[float, ...]


def distance_table(nba: Nba) -> DistanceTable:
    n = nba.n_states
    adj: list[list[int]] = [[] for _ in range(n)]
    for src in range(n):
        for dst, clauses in nba._out_clauses(src):
            if clauses:  # satisfiable guard
                adj[src].append(dst)
    rho = []
    for s in range(n):
        dist = [math.inf] * n
        dist[s] = 0
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if dist[v] > d:
                        dist[v] = d
                        nxt.append(v)
            frontier = nxt
        rho.append(tuple(dist))
    cycle = []
    for q in range(n):
        best = math.inf
        for v in adj[q]:
            best = min(best, 1 + rho[v][q])
        cycle.append(best)
    return DistanceTable(tuple(rho), tuple(cycle))


def feasible_accepting(nba: Nba, dist: DistanceTable, q0: int) -> list[int]:
    """Accepting states reachable from q0 that lie on some cycle."""
    return [qf for qf in sorted(nba.accepting)
            if dist.rho[q0][qf] != math.inf and dist.cycle[qf] != math.inf]


# ---------------------------------------------------------------------------
# Lasso acceptance
# ---------------------------------------------------------------------------

def _step_masks(nba: Nba, labels) -> list[int]:
    cache = getattr(nba, "_mask_cache", None)
    if cache is None:
        cache = {}
        nba._mask_cache = cache
    key = frozenset(labels)
    masks = cache.get(key)
    if masks is None:
        masks = []
        for q in range(nba.n_states):
            m = 0
            for dst, clauses in nba._out_clauses(q):
                if any(c.holds(key) for c in clauses):
                    m |= 1 << dst
            masks.append(m)
        cache[key] = masks
    return masks


def accepts_lasso(nba: Nba, prefix, cycle) -> bool:
    """True iff some run over prefix . cycle^omega hits accepting states forever.

    Nondeterministic state-set simulation over the prefix, then search for a
    reachable accepting cycle in the product of cycle positions and states.
    No unbounded unrolling.
    """
    if not cycle:
        raise ValueError("cycle must be nonempty")
    if nba.n_states == 0 or not nba.initial:
        return False
    cur = 0
    for q in nba.initial:
        cur |= 1 << q
    for labels in prefix:
        masks = _step_masks(nba, labels)
        nxt = 0
        s = cur
        while s:
            low = s & -s
            nxt |= masks[low.bit_length() - 1]
            s ^= low
        cur = nxt
        if cur == 0:
            return False

    L = len(cycle)
    cycle_masks = [_step_masks(nba, labels) for labels in cycle]

    def successors(node):
        i, q = node
        mask = cycle_masks[i][q]
        j = (i + 1) % L
        out = []
        while mask:
            low = mask & -mask
            out.append((j, low.bit_length() - 1))
            mask ^= low
        return out

    start = []
    s = cur
    while s:
        low = s & -s
        start.append((0, low.bit_length() - 1))
        s ^= low

    # iterative Tarjan over the reachable product subgraph
    index_of: dict[tuple[int, int], int] = {}
    lowlink: dict[tuple[int, int], int] = {}
    on_stack: set[tuple[int, int]] = set()
    scc_stack: list[tuple[int, int]] = []
    counter = 0
    accepting = nba.accepting

    for root in start:
        if root in index_of:
            continue
        work = [(root, iter(successors(root)))]
        index_of[root] = lowlink[root] = counter
        counter += 1
        scc_stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for child in it:
                if child not in index_of:
                    index_of[child] = lowlink[child] = counter
                    counter += 1
                    scc_stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(successors(child))))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index_of[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index_of[node]:
                comp = []
                while True:
                    v = scc_stack.pop()
                    on_stack.discard(v)
                    comp.append(v)
                    if v == node:
                        break
                has_acc = any(q in accepting for _, q in comp)
                if has_acc:
                    if len(comp) > 1:
                        return True
                    v = comp[0]
                    if v in successors(v):
                        return True
    return False
