import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from conftest import formulas
from paribus.fixtures import choice_model, control_formula, control_model
from paribus.models import ClpcModel, ModelError, PecpModel
from paribus.parsing import parse
from paribus.random_gen import random_clpc_model, random_formula, random_pecp_model, random_stit_model
from paribus.semantics import (
    PecpEvaluator,
    check_atom_split_instance,
    check_reduce_instance,
    eval_clpc,
    eval_clpc_by_update,
    eval_pecp,
    eval_s5,
    eval_stit,
    s5_instances,
    valid_in_model,
)
from paribus.syntax import (
    BOT,
    TOP,
    Atom,
    Box,
    BoxAll,
    CoopBox,
    CoopDiamond,
    Diamond,
    Not,
    StitBox,
    StitDiamond,
    atoms_of,
    iter_dag,
    signatures_in,
)
from paribus.verify import MUTANTS

p, q = Atom("p"), Atom("q")


def test_pecp_examples():
    m = PecpModel(("a", "b"), {"p": {"a"}})
    assert not eval_pecp(m, "a", Diamond({"p"}, Not(p)))
    assert eval_pecp(m, "a", Diamond((), Not(p)))
    with pytest.raises(ModelError):
        eval_pecp(m, "zz", p)


def test_global_diamond_and_validity():
    rng = random.Random(1)
    law = parse("pecp", "[{p}]p | [{p}]~p")
    for _ in range(100):
        m = random_pecp_model(rng, ("p", "q"))
        assert valid_in_model(m, law)
        f = random_formula(rng, "pecp", ("p", "q"), depth=2)
        somewhere = any(eval_pecp(m, w, f) for w in m.worlds)
        assert all(eval_pecp(m, w, Diamond((), f)) == somewhere for w in m.worlds)


def test_stit_examples():
    m = choice_model({"p": {"u", "v"}})
    assert eval_stit(m, "u", StitBox({1, 2}, p))
    assert not eval_stit(m, "u", StitBox({1}, p))
    assert all(eval_stit(m, w, StitBox((), TOP)) for w in m.worlds)
    with pytest.raises(ModelError):
        eval_stit(m, "u", StitBox({3}, p))


def test_clpc_examples():
    m = control_model()
    assert eval_clpc(m, control_formula())
    assert not eval_clpc(m, parse("clpc", "dia{2}p"))
    with pytest.raises(ValueError):
        eval_clpc(m, Atom("s"))


def test_s5_examples():
    m = PecpModel(("a", "b"), {})
    assert eval_s5(m, "a", BoxAll(TOP))
    assert not eval_s5(m, "a", Not(BoxAll(Not(p))))


def test_s5_agrees_with_global_pecp_modality():
    rng = random.Random(2)
    for _ in range(500):
        m = random_pecp_model(rng, ("p", "q"), max_worlds=4)
        g = random_formula(rng, "s5", ("p", "q"), depth=2)
        image = _box_all_to_global(g)
        for w in m.worlds:
            assert eval_s5(m, w, g) == eval_pecp(m, w, image)


def _box_all_to_global(f):
    out = {}
    for g in iter_dag(f):
        t = type(g)
        if t is BoxAll:
            out[g] = Box((), out[g.arg])
        elif t is Not:
            out[g] = Not(out[g.arg])
        elif g.children:
            out[g] = type(g)(out[g.left], out[g.right])
        else:
            out[g] = g
    return out[f]


def test_clpc_empty_coalition_and_grand_coalition():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 3)
        atoms = ("p", "q", "r")[: rng.randint(1, 3)]
        m = random_clpc_model(rng, atoms, n)
        f = random_formula(rng, "clpc", atoms, depth=2, agents=tuple(range(1, n + 1)))
        assert eval_clpc(m, CoopDiamond((), f)) == eval_clpc(m, f)
        some = any(
            eval_clpc(ClpcModel(n, m.control, frozenset(a for a, b in zip(atoms, bits) if b)), f)
            for bits in product([False, True], repeat=len(atoms))
        )
        assert eval_clpc(m, CoopDiamond(range(1, n + 1), f)) == some


def test_clpc_memo_matches_reference():
    rng = random.Random(4)
    for _ in range(300):
        n = rng.randint(1, 3)
        atoms = ("p", "q", "r")[: rng.randint(1, 3)]
        m = random_clpc_model(rng, atoms, n)
        f = random_formula(rng, "clpc", atoms, depth=3, agents=tuple(range(1, n + 1)))
        assert eval_clpc(m, f) == eval_clpc_by_update(m, f)


def test_duality_all_families():
    rng = random.Random(5)
    for _ in range(100):
        pm = random_pecp_model(rng, ("p", "q"))
        f = random_formula(rng, "pecp", ("p", "q"), depth=2)
        x = frozenset(rng.sample(["p", "q"], rng.randint(0, 2)))
        for w in pm.worlds:
            assert eval_pecp(pm, w, Box(x, f)) == (not eval_pecp(pm, w, Diamond(x, Not(f))))
        sm = random_stit_model(rng, ("p", "q"))
        g = random_formula(rng, "stit", ("p", "q"), depth=2)
        for w in sm.worlds:
            assert eval_stit(sm, w, StitBox({1}, g)) == (not eval_stit(sm, w, StitDiamond({1}, Not(g))))
        cm = random_clpc_model(rng, ("p", "q"), 2)
        h = random_formula(rng, "clpc", ("p", "q"), depth=2)
        assert eval_clpc(cm, CoopBox({1}, h)) == (not eval_clpc(cm, CoopDiamond({1}, Not(h))))


def test_reduce_and_atom_split_examples():
    rng = random.Random(6)
    m = random_pecp_model(rng, ("p", "q"))
    assert check_reduce_instance(m, (), q)
    assert check_atom_split_instance(m, "p", BOT)
    for _ in range(200):
        m = random_pecp_model(rng, ("p", "q", "r"))
        f = random_formula(rng, "pecp", ("p", "q", "r"), depth=2)
        x = frozenset(rng.sample(["p", "q", "r"], rng.randint(0, 3)))
        assert check_reduce_instance(m, x, f)
        assert check_atom_split_instance(m, rng.choice("pqr"), f)
        assert all(valid_in_model(m, g) for g in s5_instances(f).values())


def test_mutants_break_reduce_or_atom_split():
    rng = random.Random(7)
    cases = []
    for _ in range(300):
        m = random_pecp_model(rng, ("p", "q"))
        f = random_formula(rng, "pecp", ("p", "q"), depth=2)
        cases.append((m, frozenset(rng.sample(["p", "q"], rng.randint(1, 2))), f))
    for name in ("neg-is-identity", "conj-is-disjunction", "diamond-ignores-signature", "diamond-as-box"):
        cls = MUTANTS[name]
        assert any(
            not check_reduce_instance(m, x, f, cls(m)) or not check_atom_split_instance(m, "p", f, cls(m))
            for m, x, f in cases
        ), name


def _collapse(m, relevant):
    seen = {}
    for w in m.worlds:
        key = tuple(m.holds(a, w) for a in relevant)
        seen.setdefault(key, w)
    keep = tuple(seen.values())
    return PecpModel(keep, {a: c & set(keep) for a, c in m.valuation.items()}), seen


@given(formulas("pecp", atoms=("p", "q")), st.integers(0, 10_000))
def test_quotient_invariance(f, seed):
    rng = random.Random(seed)
    m = random_pecp_model(rng, ("p", "q", "r"))
    relevant = sorted(atoms_of(f).union(*signatures_in(f)))
    small, rep = _collapse(m, relevant)
    for w in m.worlds:
        key = tuple(m.holds(a, w) for a in relevant)
        assert eval_pecp(m, w, f) == eval_pecp(small, rep[key], f)


@given(formulas("pecp", atoms=("p", "q")), st.integers(0, 10_000))
def test_monotone_signatures(f, seed):
    rng = random.Random(seed)
    m = random_pecp_model(rng, ("p", "q"))
    ev = PecpEvaluator(m)
    for x, y in (({"p"}, {"q"}), ((), {"p"}), ({"p"}, {"p", "q"})):
        big = ev.truth(Diamond(set(x) | set(y), f))
        small = ev.truth(Diamond(x, f))
        assert big & ~small == 0
