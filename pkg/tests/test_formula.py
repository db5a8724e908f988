import numpy as np
import pytest

from ltlplan.formula import (
    AtomicProp,
    DnfExplosionError,
    FormulaSyntaxError,
    LAlways,
    LAnd,
    LAtom,
    LEventually,
    LNot,
    LRelease,
    LTrue,
    LUntil,
    PAnd,
    PAtom,
    PFalse,
    PNot,
    POr,
    PTrue,
    UnsupportedOperatorError,
    dnf_formula,
    eval_prop,
    format_ltl,
    format_prop,
    nnf,
    parse_ltl,
    parse_prop,
    to_dnf,
)

from oracles import (
    assignments,
    eval_ltl_lasso,
    eval_prop_reference,
    random_ltl,
    random_prop,
)

A11 = AtomicProp(1, 1)
A22 = AtomicProp(2, 2)


def test_parse_prop_basic():
    f = parse_prop("pi(1,1) && !pi(2,2)")
    assert f == PAnd((PAtom(A11), PNot(PAtom(A22))))


def test_parse_prop_constants():
    assert parse_prop("true") == PTrue()
    assert parse_prop("false") == PFalse()


def test_parse_prop_or_of_and():
    f = parse_prop("pi(1,3) || (pi(2,1) && pi(3,5))")
    assert isinstance(f, POr)
    assert len(f.children) == 2
    assert f.children[0] == PAtom(AtomicProp(1, 3))
    assert isinstance(f.children[1], PAnd)


def test_parse_prop_precedence():
    # ! binds tighter than &&, which binds tighter than ||
    f = parse_prop("!pi(1,1) && pi(2,2) || pi(1,2)")
    assert isinstance(f, POr)
    assert isinstance(f.children[0], PAnd)


def test_parse_prop_errors():
    with pytest.raises(FormulaSyntaxError):
        parse_prop("pi(1,1) &&")
    with pytest.raises(FormulaSyntaxError):
        parse_prop("pi(0,1)")
    with pytest.raises(FormulaSyntaxError):
        parse_prop("pi(3,1)", n_robots=2, n_regions=6)
    with pytest.raises(FormulaSyntaxError):
        parse_prop("pi(1,9)", n_robots=2, n_regions=6)
    err = pytest.raises(FormulaSyntaxError, parse_prop, "pi(1,1) @@").value
    assert err.position == 8


def test_eval_prop_examples():
    f = PAnd((PAtom(A11), PNot(PAtom(A22))))
    assert eval_prop(f, {A11}) is True
    assert eval_prop(PAtom(A11), frozenset()) is False


def test_eval_prop_vs_truth_table():
    atoms = [AtomicProp(1, j) for j in range(1, 5)]
    rng = np.random.default_rng(7)
    for _ in range(60):
        f = random_prop(rng, atoms, depth=4)
        for labels in assignments(atoms):
            assert eval_prop(f, labels) == eval_prop_reference(f, labels)


def test_to_dnf_distribution():
    a, b, c = PAtom(A11), PAtom(A22), PAtom(AtomicProp(1, 3))
    clauses = to_dnf(PAnd((POr((a, b)), c)))
    got = {(cl.positives, cl.negatives) for cl in clauses}
    assert got == {
        (frozenset([A11, AtomicProp(1, 3)]), frozenset()),
        (frozenset([A22, AtomicProp(1, 3)]), frozenset()),
    }


def test_to_dnf_constants():
    assert to_dnf(PFalse()) == []
    cl, = to_dnf(PTrue())
    assert not cl.positives and not cl.negatives
    # p && !p vanishes
    assert to_dnf(PAnd((PAtom(A11), PNot(PAtom(A11))))) == []


def test_to_dnf_equivalence_truth_table():
    atoms = [AtomicProp(1, j) for j in range(1, 5)]
    rng = np.random.default_rng(11)
    for _ in range(80):
        f = random_prop(rng, atoms, depth=4)
        g = dnf_formula(to_dnf(f))
        for labels in assignments(atoms):
            assert eval_prop(f, labels) == eval_prop(g, labels)


def test_to_dnf_explosion_guard():
    # (a1||b1) && (a2||b2) && ... blows up exponentially
    parts = []
    for j in range(1, 14):
        parts.append(POr((PAtom(AtomicProp(1, j)), PAtom(AtomicProp(2, j)))))
    with pytest.raises(DnfExplosionError):
        to_dnf(PAnd(tuple(parts)), max_clauses=4096)


def test_parse_ltl_recurrence():
    f = parse_ltl("[]<> pi(1,1) && []<> pi(2,2)")
    assert f == LAnd((LAlways(LEventually(LAtom(A11))),
                      LAlways(LEventually(LAtom(A22)))))


def test_parse_ltl_next_rejected():
    with pytest.raises(UnsupportedOperatorError):
        parse_ltl("X pi(1,1)")


def test_parse_ltl_until():
    f = parse_ltl("!pi(1,1) U pi(1,2)")
    assert f == LUntil(LNot(LAtom(A11)), LAtom(AtomicProp(1, 2)))


def test_parse_ltl_f_g_aliases():
    assert parse_ltl("F pi(1,1)") == parse_ltl("<> pi(1,1)")
    assert parse_ltl("G pi(1,1)") == parse_ltl("[] pi(1,1)")


def test_roundtrip_prop():
    atoms = [AtomicProp(i, j) for i in (1, 2) for j in (1, 2)]
    rng = np.random.default_rng(3)
    for _ in range(200):
        f = random_prop(rng, atoms, depth=4)
        assert parse_prop(format_prop(f)) == f


def test_roundtrip_ltl():
    atoms = [AtomicProp(i, j) for i in (1, 2) for j in (1, 2)]
    rng = np.random.default_rng(5)
    for _ in range(200):
        f = random_ltl(rng, atoms, depth=4)
        assert parse_ltl(format_ltl(f)) == f


def test_nnf_dualities():
    a = LAtom(A11)
    b = LAtom(A22)
    assert nnf(LNot(LAlways(a))) == LEventually(LNot(a))
    assert nnf(LNot(LUntil(a, b))) == LRelease(LNot(a), LNot(b))
    assert nnf(LNot(LEventually(a))) == LAlways(LNot(a))
    assert nnf(LNot(LNot(a))) == a


def _no_negation_above_atoms(f):
    if isinstance(f, LNot):
        return isinstance(f.child, (LAtom, LTrue))
    kids = []
    if isinstance(f, (LAnd,)) or isinstance(f, tuple):
        kids = list(f.children)
    elif hasattr(f, "children"):
        kids = list(f.children)
    elif hasattr(f, "left"):
        kids = [f.left, f.right]
    elif hasattr(f, "child"):
        kids = [f.child]
    return all(_no_negation_above_atoms(k) for k in kids)


def test_nnf_shape_and_semantics():
    atoms = [A11, A22]
    rng = np.random.default_rng(13)
    words = []
    wr = np.random.default_rng(17)
    for _ in range(40):
        total = int(wr.integers(1, 7))
        cyc = int(wr.integers(1, total + 1))
        sym = lambda: frozenset(a for a in atoms if wr.random() < 0.5)
        words.append(([sym() for _ in range(total - cyc)],
                      [sym() for _ in range(cyc)]))
    for _ in range(60):
        f = random_ltl(rng, atoms, depth=4)
        g = nnf(f)
        assert _no_negation_above_atoms(g)
        for pre, cyc in words:
            assert eval_ltl_lasso(f, pre, cyc) == eval_ltl_lasso(g, pre, cyc)
