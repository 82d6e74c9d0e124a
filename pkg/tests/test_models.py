import json
import random

import pytest
from hypothesis import given, strategies as st

from paribus.fixtures import CHOICE_REP_DIGITS, choice_model, control_model
from paribus.models import (
    ClpcModel,
    ModelError,
    Partition,
    PecpModel,
    StitModel,
    clpc_to_stit_model,
    clpc_update,
    coalition_relation,
    equiv_mod_x,
    equivalence_classes,
    load_model,
    dump_model,
    model_from_dict,
    model_to_dict,
    pad_choices,
    pecp_to_stit_model,
    stit_to_clpc_model,
    stit_to_pecp_model,
    validate_stit,
)
from paribus.random_gen import random_clpc_model, random_formula, random_stit_model
from paribus.semantics import eval_stit, valid_in_model
from paribus.syntax import Atom, StitBox
from paribus.translate import RepScheme, bridge_formulas, grid_m


def test_equiv_mod_x_examples():
    m = PecpModel(("a", "b"), {"p": {"a"}})
    assert equiv_mod_x(m, (), "a", "b")
    assert equiv_mod_x(m, {"p"}, "a", "a")
    assert not equiv_mod_x(m, {"p"}, "a", "b")
    with pytest.raises(ModelError):
        equiv_mod_x(m, (), "a", "zz")


def test_partition_rejects_bad_blocks():
    with pytest.raises(ModelError):
        Partition(("a", "b"), [["a"], ["a", "b"]])
    with pytest.raises(ModelError):
        Partition(("a", "b"), [["a"]])
    with pytest.raises(ModelError):
        Partition(("a",), [["a", "x"]])


def test_choice_model_choices():
    m = choice_model()
    assert validate_stit(m) == []
    assert coalition_relation(m, {1, 2}).block_of("u") == frozenset("uv")
    assert coalition_relation(m, {1}).block_of("u") == frozenset("wuv")
    assert coalition_relation(m, ()).blocks == (frozenset(m.worlds),)
    with pytest.raises(ModelError):
        coalition_relation(m, {3})


def test_group_relation_refines_members():
    rng = random.Random(3)
    for _ in range(50):
        m = random_stit_model(rng, ("p",), n_agents=3)
        both = coalition_relation(m, {1, 2})
        assert both.refines(coalition_relation(m, {1}))
        assert both.refines(coalition_relation(m, {2}))


def test_independence_violation_is_named():
    ws = ("a", "b")
    m = StitModel(
        ws, 2, Partition.single(ws),
        {1: Partition(ws, [["a"], ["b"]]), 2: Partition(ws, [["a"], ["b"]])},
    )
    problems = validate_stit(m)
    assert problems and all("independence" in p for p in problems)


def test_refinement_violation_is_named():
    ws = ("a", "b")
    m = StitModel(ws, 1, Partition(ws, [["a"], ["b"]]), {1: Partition.single(ws)})
    assert any("refinement" in p for p in validate_stit(m))


def test_clpc_update_examples():
    m = control_model()
    assert clpc_update(m, {1, 2}, {"p"}).true_atoms == {"p", "r"}
    assert clpc_update(m, {1, 2}, m.true_atoms & m.controlled_by({1, 2})) == m
    assert clpc_update(m, (), ()) == m
    with pytest.raises(ModelError):
        clpc_update(m, {2}, {"p"})


def test_clpc_control_must_be_exclusive():
    with pytest.raises(ModelError):
        ClpcModel(2, {1: {"p"}, 2: {"p"}}, frozenset())
    with pytest.raises(ModelError):
        ClpcModel(1, {1: {"p"}}, frozenset({"q"}))


def test_pad_choice_model():
    m = choice_model({"p": {"u", "v"}})
    padded = pad_choices(m, 4)
    assert validate_stit(padded) == []
    assert all(len(padded.r_agent[j]) == 4 for j in (1, 2))
    rng = random.Random(5)
    battery = [random_formula(rng, "stit", ("p",), depth=3, agents=(1, 2)) for _ in range(40)]
    for f in battery:
        for w in m.worlds:
            assert eval_stit(m, w, f) == eval_stit(padded, w, f)
    with pytest.raises(ModelError):
        pad_choices(m, 2)
    with pytest.raises(ModelError):
        pad_choices(m, 3)


def test_pad_noop_when_uniform():
    m = pad_choices(choice_model(), 4)
    assert pad_choices(m, 4).worlds == m.worlds


def test_choice_model_rep_digits():
    pm = stit_to_pecp_model(pad_choices(choice_model(), 4), 2)
    for (j, block), digits in CHOICE_REP_DIGITS.items():
        for w in block:
            assert (pm.holds(f"rep_{j}_1", w), pm.holds(f"rep_{j}_2", w)) == digits


def test_rep_model_satisfies_grid_and_round_trips():
    padded = pad_choices(choice_model(), 4)
    pm = stit_to_pecp_model(padded, 2)
    scheme = RepScheme(2, 2)
    assert valid_in_model(pm, grid_m(scheme))
    back = pecp_to_stit_model(pm, scheme.as_mapping())
    assert validate_stit(back) == []
    for j in (1, 2):
        assert back.r_agent[j] == padded.r_agent[j]


def test_grid_fails_when_a_combination_is_missing():
    pm = stit_to_pecp_model(pad_choices(choice_model(), 4), 2)
    keep = pm.worlds[:-1]
    smaller = PecpModel(keep, {a: c & set(keep) for a, c in pm.valuation.items()})
    assert not valid_in_model(smaller, grid_m(RepScheme(2, 2)))


def test_stit_to_pecp_model_preconditions():
    with pytest.raises(ModelError):
        stit_to_pecp_model(choice_model(), 2)
    padded = pad_choices(choice_model({"rep_1_1": {"w"}}), 4)
    with pytest.raises(ModelError):
        stit_to_pecp_model(padded, 2)


def test_pecp_to_stit_rejects_overlap():
    m = PecpModel(("a",), {})
    with pytest.raises(ModelError):
        pecp_to_stit_model(m, {1: ["x"], 2: ["x"]})
    single = pecp_to_stit_model(PecpModel(("a", "b"), {"x": {"a", "b"}}), {1: ["x"]})
    assert len(single.r_agent[1]) == 1


def test_control_model_as_stit():
    stit, w0 = clpc_to_stit_model(control_model())
    assert len(stit.worlds) == 8
    assert [len(b) for b in stit.r_agent[1].blocks] == [4, 4]
    assert validate_stit(stit) == []
    assert w0 == "{r}"
    assert valid_in_model(stit, bridge_formulas(3, ("p", "q", "r")))
    assert stit_to_clpc_model(stit, w0, ("p", "q", "r")) == control_model()


def test_single_agent_controls_everything():
    m = ClpcModel(1, {1: {"p", "q"}}, frozenset({"q"}))
    stit, w0 = clpc_to_stit_model(m)
    assert stit_to_clpc_model(stit, w0).control[1] == {"p", "q"}


def test_stit_to_clpc_requires_bridges():
    with pytest.raises(ModelError):
        stit_to_clpc_model(choice_model({"p": {"u"}}), "u", ("p",))


def test_control_complement_law():
    # Ctrl of a coalition and of its complement split the atoms
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(1, 3)
        atoms = ("p", "q", "r")[: rng.randint(1, 3)]
        cm = random_clpc_model(rng, atoms, n)
        stit, w0 = clpc_to_stit_model(cm)
        back = stit_to_clpc_model(stit, w0, atoms)
        coalition = {j for j in range(1, n + 1) if rng.random() < 0.5}
        rest = set(range(1, n + 1)) - coalition
        assert back.controlled_by(rest) == set(atoms) - back.controlled_by(coalition)


@given(st.integers(0, 10_000))
def test_clpc_roundtrip_property(seed):
    rng = random.Random(seed)
    atoms = ("p", "q", "r")[: rng.randint(1, 3)]
    cm = random_clpc_model(rng, atoms, rng.randint(1, 3))
    stit, w0 = clpc_to_stit_model(cm)
    assert len(stit.worlds) == 2 ** len(atoms)
    assert stit_to_clpc_model(stit, w0, atoms) == cm


@given(st.integers(0, 10_000))
def test_random_stit_models_are_valid_and_pad(seed):
    rng = random.Random(seed)
    m = random_stit_model(rng, ("p",), n_agents=2)
    assert validate_stit(m) == []
    worst = max(len(p) for p in m.r_agent.values())
    padded = pad_choices(m, 1 << (worst - 1).bit_length())
    assert validate_stit(padded) == []


@given(st.integers(0, 10_000))
def test_equivalence_classes_match_relation(seed):
    rng = random.Random(seed)
    from paribus.random_gen import random_pecp_model

    m = random_pecp_model(rng, ("p", "q"))
    x = {"p"} if rng.random() < 0.5 else {"p", "q"}
    part = equivalence_classes(m, x)
    for w in m.worlds:
        for v in m.worlds:
            assert part.related(w, v) == equiv_mod_x(m, x, w, v)


def test_json_round_trip(tmp_path):
    for m in (
        choice_model({"p": {"u"}}),
        control_model(),
        PecpModel(("w", "u"), {"p": {"w"}}),
    ):
        path = tmp_path / "m.json"
        dump_model(m, path)
        back = load_model(path)
        assert model_to_dict(back) == model_to_dict(m)


def test_json_rejects_unknown_keys_and_bad_files(tmp_path):
    with pytest.raises(ModelError):
        model_from_dict({"type": "pecp", "worlds": ["w"], "colour": 1})
    with pytest.raises(ModelError):
        model_from_dict({"type": "kripke"})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelError):
        load_model(bad)


def test_shipped_model_files():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "models"
    loaded = load_model(root / "choices.json")
    assert validate_stit(loaded) == []
    assert eval_stit(loaded, "u", StitBox({1, 2}, Atom("p")))
    data = json.loads((root / "not_independent.json").read_text())
    assert validate_stit(model_from_dict(data))
    with pytest.raises(ModelError):
        load_model(root / "overlapping_control.json")
