import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from conftest import formulas
from paribus.config import CapExceeded, Limits, set_limits
from paribus.parsing import parse
from paribus.random_gen import random_formula
from paribus.sat.cnf import CnfInstance, parse_dimacs
from paribus.sat.dpll import CdclEngine, DpllEngine, make_engine, solve
from paribus.sat.oracles import (
    sat_clpc_direct,
    sat_pecp_bruteforce,
    sat_s5_bruteforce,
    sat_stit_oracle,
)
from paribus.sat.pipelines import (
    sat_clpc_via_embedding,
    sat_individual_stit,
    sat_pecp,
    sat_pecp_nested,
    sat_stit_bounded,
)
from paribus.sat.s5 import sat_s5
from paribus.semantics import S5Evaluator, eval_clpc, eval_pecp, eval_stit
from paribus.syntax import Not

ENGINES = [DpllEngine(), CdclEngine()]


def truth_table_sat(inst: CnfInstance) -> bool:
    for bits in product([False, True], repeat=inst.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in inst.clauses):
            return True
    return False


def satisfies(inst: CnfInstance, asg: dict[int, bool]) -> bool:
    return all(any(asg[abs(l)] == (l > 0) for l in c) for c in inst.clauses)


@pytest.mark.parametrize("engine", ENGINES, ids=lambda e: e.name)
def test_small_cnf_examples(engine):
    sat = CnfInstance(2, [[1, 2], [-1]])
    res = engine.solve(sat)
    assert res.satisfiable and res.assignment[2] and not res.assignment[1]
    assert not engine.solve(CnfInstance(1, [[1], [-1]])).satisfiable
    assert not engine.solve(CnfInstance(0, [[]])).satisfiable
    assert engine.solve(CnfInstance(0, [])).satisfiable


@pytest.mark.parametrize("engine", ENGINES, ids=lambda e: e.name)
def test_random_3cnf_against_truth_table(engine):
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(1, 8)
        clauses = [
            [rng.choice([1, -1]) * rng.randint(1, n) for _ in range(3)]
            for _ in range(rng.randint(1, 5 * n))
        ]
        inst = CnfInstance(n, clauses)
        res = engine.solve(inst)
        assert res.satisfiable == truth_table_sat(inst)
        if res.satisfiable:
            assert satisfies(inst, res.assignment)


@given(st.lists(st.lists(st.integers(1, 6).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=4), max_size=20))
def test_engines_agree(clauses):
    inst = CnfInstance(6, clauses)
    assert DpllEngine().solve(inst).satisfiable == CdclEngine().solve(inst).satisfiable


def test_dimacs_roundtrip():
    inst = CnfInstance(3, [[1, -2], [3], [-1, 2, -3]])
    back = parse_dimacs("c comment\n" + inst.to_dimacs())
    assert (back.num_vars, back.clauses) == (3, inst.clauses)
    with pytest.raises(ValueError):
        parse_dimacs("p dnf 1 1\n1 0\n")


def test_engine_names():
    assert make_engine("dpll").name == "dpll"
    assert make_engine("cdcl").name == "cdcl"
    with pytest.raises(ValueError):
        make_engine("minisat")


# -- S5 ----------------------------------------------------------------------------


def test_s5_examples():
    assert not sat_s5(parse("s5", "[]p & <>~p"))
    assert sat_s5(parse("s5", "<>p & <>~p"))
    assert not sat_s5(parse("s5", "p & []~p"))


@pytest.mark.parametrize("mode", ["generic", "enumerate"])
def test_s5_against_bruteforce(mode):
    rng = random.Random(13)
    for _ in range(250):
        f = random_formula(rng, "s5", ("p", "q", "r"), depth=rng.randint(0, 4))
        v = sat_s5(f, mode=mode)
        assert bool(v) == bool(sat_s5_bruteforce(f))
        if v:
            assert S5Evaluator(v.witness).holds(v.world, f)


@given(formulas("s5"))
def test_s5_modes_agree(f):
    assert bool(sat_s5(f, mode="generic")) == bool(sat_s5(f, mode="enumerate"))


def test_s5_rejects_other_languages():
    with pytest.raises(ValueError):
        sat_s5(parse("pecp", "<{p}>q"))
    with pytest.raises(ValueError):
        sat_s5(parse("s5", "p"), mode="fast")


# -- PECP --------------------------------------------------------------------------


def test_pecp_examples():
    assert sat_pecp(parse("pecp", "<{p}>~p"))
    assert not sat_pecp(parse("pecp", "p & [{p}]~p"))
    assert sat_pecp(parse("pecp", "<{}>p & <{}>~p"))
    assert not sat_pecp(parse("pecp", "[{}]p & <{q}>~p"))
    v = sat_pecp(parse("pecp", "q & <{q}>(p & ~q)"))
    assert not v


def test_pecp_witness_is_checked():
    f = parse("pecp", "<{p}>q & <{p}>~q & [{}](r | p)")
    v = sat_pecp(f)
    assert v and eval_pecp(v.witness, v.world, f)


@given(formulas("pecp", max_leaves=8))
@settings(max_examples=60)
def test_pecp_negation_coherence(f):
    # every formula or its negation has a model
    assert sat_pecp(f) or sat_pecp(Not(f))
    assert bool(sat_pecp(f)) == bool(sat_pecp_bruteforce(f))


# -- STIT --------------------------------------------------------------------------


def test_stit_bounded_examples():
    assert not sat_stit_bounded(parse("stit", "[{1}:stit]p & <{1}:stit>~p"), 1)
    v = sat_stit_bounded(parse("stit", "<{}:stit>p & <{}:stit>~p"), 1)
    assert v and eval_stit(v.witness, v.world, parse("stit", "<{}:stit>p & <{}:stit>~p"))


def test_stit_bounded_choice_limit():
    # three pairwise distinct choices for one agent need two digits
    f = parse("stit", "<{}:stit>[{1}:stit]p & <{}:stit>[{1}:stit](~p & q) & <{}:stit>[{1}:stit](~p & ~q)")
    assert not sat_stit_bounded(f, 1)
    v = sat_stit_bounded(f, 2)
    assert v and eval_stit(v.witness, v.world, f)
    assert bool(sat_stit_oracle(f, max_choices=4)) and not sat_stit_oracle(f, max_choices=2)


def test_individual_stit_examples():
    assert sat_individual_stit(parse("stit", "[{1}:stit]p & <{2}:stit>~p"))
    assert not sat_individual_stit(parse("stit", "[{1}:stit]p & ~p"))
    v = sat_individual_stit(parse("stit", "[{3}:stit]p"))
    assert v and v.witness.n_agents == 3
    with pytest.raises(ValueError):
        sat_individual_stit(parse("stit", "[{1,2}:stit]p"))


# -- CL-PC -------------------------------------------------------------------------


def test_clpc_examples():
    assert not sat_clpc_direct(parse("clpc", "dia{1}p & box{1}~p"), 2)
    v = sat_clpc_direct(parse("clpc", "dia{1}p & ~dia{2}p"), 2, ["p"])
    assert v and "p" in v.witness.control[1]
    assert sat_clpc_direct(parse("clpc", "p"), 1, ["p"])
    with pytest.raises(ValueError):
        sat_clpc_direct(parse("clpc", "dia{3}p"), 2)


def test_clpc_routes_agree_on_examples():
    for text in ["dia{1}p & box{1}~p", "dia{1}p & ~dia{2}p", "dia{}p & ~p", "box{1,2}p"]:
        f = parse("clpc", text)
        direct = sat_clpc_direct(f, 2, ["p", "q"])
        via = sat_clpc_via_embedding(f, 2, ["p", "q"])
        assert bool(direct) == bool(via)
        if via:
            assert eval_clpc(via.witness, f)


# -- nested fragment ---------------------------------------------------------------


def test_nested_sat_artifact():
    v = sat_pecp_nested(parse("pecp", "[{p}]p"))
    assert v and v.artifact.n_agents == 1
    with pytest.raises(ValueError):
        sat_pecp_nested(parse("pecp", "[{p}]p & [{q}]p"))


# -- caps --------------------------------------------------------------------------


def test_caps_raise():
    many = parse("pecp", " & ".join(f"a{i}" for i in range(7)))
    with pytest.raises(CapExceeded):
        sat_pecp_bruteforce(many)
    with pytest.raises(CapExceeded):
        sat_stit_oracle(parse("stit", "p & q & r"))
    set_limits(Limits(pecp_oracle_atoms=8))
    try:
        assert sat_pecp_bruteforce(many)
    finally:
        set_limits(None)


def test_env_override(monkeypatch):
    many = parse("pecp", " & ".join(f"a{i}" for i in range(7)))
    monkeypatch.setenv("PARIBUS_MAX_ATOMS", "7")
    assert sat_pecp_bruteforce(many)
    monkeypatch.setenv("PARIBUS_MAX_ATOMS", "lots")
    with pytest.raises(CapExceeded):
        sat_pecp_bruteforce(many)


def test_solve_uses_given_engine():
    inst = CnfInstance(2, [[1], [-1, 2]])
    assert solve(inst, DpllEngine()).assignment == {1: True, 2: True}
