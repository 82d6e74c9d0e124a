import random

import pytest
from hypothesis import given, strategies as st

from conftest import formulas
from paribus.config import CapExceeded
from paribus.fixtures import control_formula
from paribus.parsing import parse
from paribus.random_gen import random_formula, random_pecp_model
from paribus.semantics import eval_pecp
from paribus.syntax import (
    TOP,
    And,
    Atom,
    Box,
    BoxAll,
    CoopDiamond,
    Diamond,
    Iff,
    Imp,
    Not,
    StitBox,
    StitDiamond,
    atoms_of,
    coalitions_in,
    conj,
    is_chain,
    match_iff,
    signatures_in,
)
from paribus.translate import (
    FreshAtomTable,
    RepScheme,
    TR_SIZE_CONSTANT,
    bridge_parts,
    clpc_to_pecp,
    dag_size,
    grid_m,
    reduce_rewrite,
    tr,
    tr1,
    tr2,
    tr3,
    tr4_with_control,
    tr_size_bound,
    tr_with_table,
)

p, q = Atom("p"), Atom("q")


def test_tr1_examples():
    table = FreshAtomTable(And(Box((), q), Box({"p"}, q)))
    aux_q = table[q]
    assert tr1(p, table) == p
    assert tr1(Box((), q), table) == BoxAll(aux_q)
    expected = And(Imp(p, BoxAll(Imp(p, aux_q))), Imp(Not(p), BoxAll(Imp(Not(p), aux_q))))
    assert tr1(Box({"p"}, q), table) == expected


def test_tr_of_atom():
    out, table = tr_with_table(p)
    assert out == And(table[p], BoxAll(Iff(table[p], p)))


def test_fresh_atoms_are_dense_and_reserved():
    f = parse("pecp", "[{p}](q & <{}>p)")
    table = FreshAtomTable(f)
    names = sorted(a.name for a in table.mapping.values())
    assert names == sorted(f"aux_{k}" for k in range(1, len(table) + 1))
    with pytest.raises(ValueError):
        FreshAtomTable(Atom("aux_1"))
    with pytest.raises(KeyError):
        table[Atom("zz")]


@given(formulas("pecp"))
def test_each_aux_atom_has_one_definition(f):
    out, table = tr_with_table(f)
    defined = []
    conjuncts = []
    stack = [out.right]
    while stack:
        g = stack.pop()
        if type(g) is And:
            stack += [g.left, g.right]
        else:
            conjuncts.append(g)
    for c in conjuncts:
        assert type(c) is BoxAll
        lhs, _ = match_iff(c.arg)
        defined.append(lhs)
    assert sorted(a.name for a in defined) == sorted(a.name for a in table.mapping.values())


def test_size_bound_on_random_formulas():
    rng = random.Random(8)
    for _ in range(1000):
        f = random_formula(rng, "pecp", ("p", "q", "r", "s"), depth=rng.randint(0, 4), max_sig=rng.randint(0, 4))
        assert dag_size(tr(f)) <= tr_size_bound(f)
    assert TR_SIZE_CONSTANT == 24


def test_reduce_rewrite_examples():
    assert reduce_rewrite(Box((), p)) == Box((), p)
    out = reduce_rewrite(Box({"p"}, q))
    assert signatures_in(out) == {frozenset()}
    with pytest.raises(CapExceeded):
        reduce_rewrite(parse("pecp", "[{p,q}][{p,q}][{p,q}]p"), max_nodes=50)


def test_reduce_rewrite_is_equivalent():
    rng = random.Random(9)
    for _ in range(200):
        f = random_formula(rng, "pecp", ("p", "q"), depth=2, max_sig=2)
        g = reduce_rewrite(f)
        assert signatures_in(g) <= {frozenset()}
        m = random_pecp_model(rng, ("p", "q"))
        assert all(eval_pecp(m, w, f) == eval_pecp(m, w, g) for w in m.worlds)


def test_grid_m_one_agent_one_digit():
    x = Atom("rep_1_1")
    expected = Box((), And(Imp(x, Diamond((), Not(x))), Imp(Not(x), Diamond((), x))))
    assert grid_m(RepScheme(1, 1)) == expected


def test_tr2_examples():
    assert tr2(StitBox((), p), RepScheme(1, 1)) == Box((), p)
    assert tr2(parse("stit", "[{1}:stit]p"), RepScheme(2, 1)) == parse("pecp", "[{rep_1_1,rep_1_2}]p")
    with pytest.raises(ValueError):
        tr2(StitBox({2}, p), RepScheme(1, 1))
    with pytest.raises(ValueError):
        tr2(Atom("rep_1_1"), RepScheme(1, 1))
    assert atoms_of(tr2(StitBox({1, 2}, p), RepScheme(2, 2))) >= {"rep_1_1", "rep_2_2"}


def test_tr2_preserves_chains():
    f = parse("stit", "[{1}:stit](p & [{1,2}:stit]<{1,2,3}:stit>q)")
    out = tr2(f, RepScheme(2, 3))
    assert is_chain(signatures_in(out))


def test_bridge_examples():
    parts = bridge_parts(1, ["p"])
    assert parts["EXC+"] == TOP and parts["EXC-"] == TOP
    assert parts["GRID*"] == And(StitDiamond((), p), StitDiamond((), Not(p)))
    with pytest.raises(CapExceeded):
        bridge_parts(2, [f"a{i}" for i in range(13)])


def test_tr3_examples():
    assert tr3(CoopDiamond({1, 2}, p), 2) == StitDiamond((), p)
    out = tr3(control_formula(), 3)
    assert type(out) is Not and coalitions_in(out) == {frozenset({3})}
    with pytest.raises(ValueError):
        tr3(CoopDiamond({3}, p), 2)


@given(formulas("stit", agents=(1, 2)), formulas("stit", agents=(1, 2)))
def test_translations_are_boolean_homomorphisms(f, g):
    scheme = RepScheme(1, 2)
    assert tr2(Not(f), scheme) == Not(tr2(f, scheme))
    assert tr2(And(f, g), scheme) == And(tr2(f, scheme), tr2(g, scheme))


@given(formulas("clpc", agents=(1, 2)), formulas("clpc", agents=(1, 2)))
def test_tr3_is_boolean_homomorphism(f, g):
    assert tr3(Not(f), 2) == Not(tr3(f, 2))
    assert tr3(And(f, g), 2) == And(tr3(f, 2), tr3(g, 2))


def test_tr4_examples():
    emb = tr4_with_control(Box({"p"}, p))
    assert emb.n_agents == 1
    assert emb.formula.left == StitBox({1}, p)
    plain = tr4_with_control(And(p, q))
    assert plain.formula == And(And(p, q), StitBox((), TOP))
    with pytest.raises(ValueError):
        tr4_with_control(parse("pecp", "[{p}]p & [{q}]p"))


@given(st.integers(0, 10_000))
def test_tr4_coalitions_nested(seed):
    rng = random.Random(seed)
    chain = [frozenset(), frozenset("q"), frozenset("qp"), frozenset("qpr")]
    f = random_formula(rng, "pecp", ("p", "q", "r"), depth=3, signatures=chain)
    emb = tr4_with_control(f)
    assert is_chain(coalitions_in(emb.formula))


def test_grid_star_doubles_with_each_atom():
    grid = [dag_size(bridge_parts(2, [f"a{i}" for i in range(k)])["GRID*"]) for k in range(1, 7)]
    assert all(1.9 * a <= b <= 2.1 * a for a, b in zip(grid[2:], grid[3:]))
    exc = [dag_size(bridge_parts(2, [f"a{i}" for i in range(k)])["EXC+"]) for k in range(1, 7)]
    assert len({b - a for a, b in zip(exc, exc[1:])}) == 1
    composite = [dag_size(clpc_to_pecp(TOP, 2, [f"a{i}" for i in range(k)])) for k in (1, 2, 3)]
    assert composite[0] < composite[1] < composite[2]


def test_no_reserved_collisions():
    f = parse("clpc", "dia{1}(p & ~q)")
    out = clpc_to_pecp(f, 2, ["p", "q"])
    reps = {a for a in atoms_of(out) if a.startswith("rep_")}
    assert reps == {"rep_1_1", "rep_1_2", "rep_2_1", "rep_2_2"}
    assert not any(a.startswith("aux_") for a in atoms_of(out))
    s5 = tr(out)
    assert atoms_of(s5) >= atoms_of(out)
