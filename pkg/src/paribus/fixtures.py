"""Small worked models used by the examples suite, the CLI and the tests."""

from __future__ import annotations

from paribus.models import ClpcModel, Partition, StitModel
from paribus.parsing import parse

CHOICE_WORLDS = ("w", "u", "v", "r", "s", "t", "z")


def choice_model(valuation=None) -> StitModel:
    """Two agents: agent 1 has three choices, agent 2 has two."""
    worlds = CHOICE_WORLDS
    return StitModel(
        worlds,
        2,
        Partition.single(worlds),
        {
            1: Partition(worlds, [["w", "u", "v"], ["r", "s"], ["t", "z"]]),
            2: Partition(worlds, [["w", "r", "t"], ["u", "v", "s", "z"]]),
        },
        valuation or {},
    )


# rep atom digits expected for each original choice once the choice model is padded
# to four choices per agent: (agent, block) -> (digit 1, digit 2)
CHOICE_REP_DIGITS = {
    (1, frozenset("wuv")): (False, False),
    (1, frozenset("rs")): (True, False),
    (1, frozenset("tz")): (False, True),
    (2, frozenset("wrt")): (False, False),
    (2, frozenset("uvsz")): (True, False),
}


def control_model() -> ClpcModel:
    return ClpcModel(3, {1: {"p"}, 2: {"q"}, 3: {"r"}}, frozenset({"r"}))


CONTROL_TEXT = "dia{1,2}((p & q & r) | (p & ~q & r))"


def control_formula():
    return parse("clpc", CONTROL_TEXT)


# signature chains from the nested-fragment discussion
NESTED_POSITIVE = ("[{p,q}](y & [{p}][{p,q,r,s}]x)",)
NESTED_NEGATIVE = ("[{p}]p & [{q}]p",)
