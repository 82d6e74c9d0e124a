"""Seeded generators for formulas and models used by the test suites."""

from __future__ import annotations

import random
from itertools import product
from typing import Sequence

from paribus.models import ClpcModel, Partition, PecpModel, StitModel
from paribus.syntax import (
    TOP,
    And,
    Atom,
    BoxAll,
    CoopDiamond,
    Diamond,
    Formula,
    Iff,
    Imp,
    Not,
    Or,
    StitBox,
)


def _subset(rng: random.Random, items: Sequence, max_size: int | None = None):
    items = list(items)
    chosen = [x for x in items if rng.random() < 0.5]
    if max_size is not None and len(chosen) > max_size:
        chosen = rng.sample(chosen, max_size)
    return frozenset(chosen)


def _modal(rng, language, body, atoms, agents, max_sig, signatures=None):
    if language == "pecp":
        sig = rng.choice(signatures) if signatures else _subset(rng, atoms, max_sig)
        if rng.random() < 0.5:
            return Not(Diamond(sig, Not(body)))
        return Diamond(sig, body)
    if language == "stit":
        coal = _subset(rng, agents)
        if rng.random() < 0.5:
            return StitBox(coal, body)
        return Not(StitBox(coal, Not(body)))
    if language == "clpc":
        coal = _subset(rng, agents)
        if rng.random() < 0.5:
            return CoopDiamond(coal, body)
        return Not(CoopDiamond(coal, Not(body)))
    if language == "s5":
        return BoxAll(body) if rng.random() < 0.5 else Not(BoxAll(Not(body)))
    raise ValueError(language)


def random_formula(
    rng: random.Random,
    language: str,
    atoms: Sequence[str] = ("p", "q"),
    depth: int = 2,
    agents: Sequence[int] = (1, 2),
    max_sig: int | None = None,
    size: int = 3,
    signatures: Sequence[frozenset[str]] | None = None,
) -> Formula:
    """A formula of modal depth at most ``depth`` over ``atoms``.

    ``size`` bounds the boolean nesting between modal layers.  PECP
    signatures are drawn from ``signatures`` when given.
    """

    def leaf():
        a = Atom(rng.choice(list(atoms)))
        r = rng.random()
        if r < 0.05:
            return TOP
        return Not(a) if r < 0.4 else a

    def gen(d: int, s: int) -> Formula:
        r = rng.random()
        if s <= 0 or r < 0.2:
            if d > 0 and rng.random() < 0.5:
                return _modal(rng, language, gen(d - 1, size), atoms, agents, max_sig, signatures)
            return leaf()
        if r < 0.35:
            return Not(gen(d, s - 1))
        if r < 0.6:
            return And(gen(d, s - 1), gen(d, s - 1))
        if r < 0.75:
            return Or(gen(d, s - 1), gen(d, s - 1))
        if r < 0.82:
            return Imp(gen(d, s - 1), gen(d, s - 1))
        if r < 0.86:
            return Iff(gen(d, s - 1), gen(d, s - 1))
        if d > 0:
            return _modal(rng, language, gen(d - 1, s - 1), atoms, agents, max_sig, signatures)
        return leaf()

    return gen(depth, size)


def random_pecp_model(
    rng: random.Random, atoms: Sequence[str], max_worlds: int = 6
) -> PecpModel:
    n = rng.randint(1, max_worlds)
    worlds = tuple(f"w{i}" for i in range(n))
    valuation = {a: {w for w in worlds if rng.random() < 0.5} for a in atoms}
    return PecpModel(worlds, valuation)


def _random_partition(rng: random.Random, items: Sequence[str], max_blocks: int):
    k = rng.randint(1, max(1, min(max_blocks, len(items))))
    labels = [rng.randrange(k) for _ in items]
    groups: dict[int, list[str]] = {}
    for w, lab in zip(items, labels):
        groups.setdefault(lab, []).append(w)
    return list(groups.values())


def random_stit_model(
    rng: random.Random,
    atoms: Sequence[str],
    n_agents: int = 2,
    moments: int = 2,
    max_choices: int = 3,
    max_extra: int = 1,
) -> StitModel:
    """A valid STIT model built moment by moment from choice profiles.

    Each profile of individual choices gets between 1 and 1+max_extra
    worlds, so independence holds by construction.
    """
    worlds: list[str] = []
    r_empty: list[list[str]] = []
    r_agent: dict[int, list[list[str]]] = {j: [] for j in range(1, n_agents + 1)}
    for t in range(rng.randint(1, moments)):
        counts = [rng.randint(1, max_choices) for _ in range(n_agents)]
        moment: list[str] = []
        choice_worlds = {(j, c): [] for j in range(1, n_agents + 1) for c in range(counts[j - 1])}
        for profile in product(*[range(k) for k in counts]):
            for e in range(rng.randint(1, 1 + max_extra)):
                name = f"m{t}_" + "".join(map(str, profile)) + f"_{e}"
                moment.append(name)
                for j, c in enumerate(profile, 1):
                    choice_worlds[(j, c)].append(name)
        worlds.extend(moment)
        r_empty.append(moment)
        for (j, c), ws in choice_worlds.items():
            r_agent[j].append(ws)
    worlds_t = tuple(worlds)
    valuation = {a: {w for w in worlds_t if rng.random() < 0.5} for a in atoms}
    return StitModel(
        worlds_t,
        n_agents,
        Partition(worlds_t, r_empty),
        {j: Partition(worlds_t, b) for j, b in r_agent.items()},
        valuation,
    )


def random_clpc_model(
    rng: random.Random, atoms: Sequence[str], n_agents: int
) -> ClpcModel:
    control: dict[int, set[str]] = {i: set() for i in range(1, n_agents + 1)}
    for a in atoms:
        control[rng.randint(1, n_agents)].add(a)
    true_atoms = frozenset(a for a in atoms if rng.random() < 0.5)
    return ClpcModel(n_agents, control, true_atoms)
