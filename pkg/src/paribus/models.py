"""Explicit models for PECP, STIT and CL-PC, their validators, the model
conversions used by the embedding proofs, and the JSON model format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from paribus.syntax import And, Atom, Not, Or, StitBox


class ModelError(ValueError):
    """A model violates one of its defining conditions."""


def _freeze_valuation(worlds: Sequence[str], valuation) -> dict[str, frozenset[str]]:
    known = set(worlds)
    out = {}
    for atom, cell in dict(valuation).items():
        cell = frozenset(cell)
        stray = sorted(cell - known)
        if stray:
            raise ModelError(f"valuation of {atom!r} mentions unknown worlds {stray}")
        out[atom] = cell
    return out


def _check_worlds(worlds) -> tuple[str, ...]:
    worlds = tuple(worlds)
    if not worlds:
        raise ModelError("a model needs at least one world")
    if len(set(worlds)) != len(worlds):
        raise ModelError("world names must be unique")
    for w in worlds:
        if not isinstance(w, str) or not w:
            raise ModelError(f"world names are nonempty strings, got {w!r}")
    return worlds


@dataclass(frozen=True)
class PecpModel:
    """Worlds (ordered) and a partial valuation; missing atoms are false."""

    worlds: tuple[str, ...]
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        worlds = _check_worlds(self.worlds)
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "valuation", _freeze_valuation(worlds, self.valuation))

    def true_at(self, w: str) -> frozenset[str]:
        return frozenset(a for a, cell in self.valuation.items() if w in cell)

    def holds(self, atom: str, w: str) -> bool:
        return w in self.valuation.get(atom, ())

    def require_world(self, w: str) -> None:
        if w not in self.worlds:
            raise ModelError(f"unknown world {w!r}")

    def restrict_atoms(self, keep: Iterable[str]) -> "PecpModel":
        keep = set(keep)
        return PecpModel(
            self.worlds, {a: c for a, c in self.valuation.items() if a in keep}
        )


class Partition:
    """A partition of an ordered world list into blocks.

    Blocks are kept in first-seen order of their worlds, which is the block
    enumeration used when numbering actions.
    """

    __slots__ = ("blocks", "_block_of")

    def __init__(self, worlds: Sequence[str], blocks: Iterable[Iterable[str]]):
        order = {w: i for i, w in enumerate(worlds)}
        frozen = []
        owner: dict[str, int] = {}
        for raw in blocks:
            block = frozenset(raw)
            if not block:
                raise ModelError("partition blocks must be nonempty")
            for w in block:
                if w not in order:
                    raise ModelError(f"partition mentions unknown world {w!r}")
                if w in owner:
                    raise ModelError(f"world {w!r} lies in two partition blocks")
            for w in block:
                owner[w] = -1
            frozen.append(block)
        missing = [w for w in worlds if w not in owner]
        if missing:
            raise ModelError(f"partition does not cover worlds {missing}")
        frozen.sort(key=lambda b: min(order[w] for w in b))
        self.blocks: tuple[frozenset[str], ...] = tuple(frozen)
        self._block_of = {w: i for i, b in enumerate(frozen) for w in b}

    @classmethod
    def single(cls, worlds: Sequence[str]) -> "Partition":
        return cls(worlds, [worlds])

    @classmethod
    def from_key(cls, worlds: Sequence[str], key) -> "Partition":
        """Group worlds by ``key(w)``."""
        groups: dict = {}
        for w in worlds:
            groups.setdefault(key(w), []).append(w)
        return cls(worlds, groups.values())

    def block_of(self, w: str) -> frozenset[str]:
        return self.blocks[self._block_of[w]]

    def index_of(self, w: str) -> int:
        return self._block_of[w]

    def related(self, u: str, v: str) -> bool:
        return self._block_of[u] == self._block_of[v]

    def refines(self, other: "Partition") -> bool:
        return all(other.related(next(iter(b)), w) for b in self.blocks for w in b)

    def __len__(self):
        return len(self.blocks)

    def __eq__(self, other):
        return isinstance(other, Partition) and set(self.blocks) == set(other.blocks)

    def __hash__(self):
        return hash(frozenset(self.blocks))

    def __repr__(self):
        inner = " | ".join(",".join(sorted(b)) for b in self.blocks)
        return f"Partition({inner})"


def meet(worlds: Sequence[str], parts: Iterable[Partition]) -> Partition:
    parts = list(parts)
    return Partition.from_key(worlds, lambda w: tuple(p.index_of(w) for p in parts))


@dataclass(frozen=True)
class StitModel:
    """Worlds, the R_empty partition and one choice partition per agent.

    Group relations R_J for nonempty J are derived as meets of the
    individual partitions (see :func:`coalition_relation`).
    """

    worlds: tuple[str, ...]
    n_agents: int
    r_empty: Partition
    r_agent: Mapping[int, Partition]
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        worlds = _check_worlds(self.worlds)
        object.__setattr__(self, "worlds", worlds)
        if not isinstance(self.n_agents, int) or self.n_agents < 1:
            raise ModelError("n_agents must be an integer >= 1")
        agents = dict(self.r_agent)
        if set(agents) != set(range(1, self.n_agents + 1)):
            raise ModelError(
                f"r_agent must give a partition for each agent 1..{self.n_agents}"
            )
        for p in [self.r_empty, *agents.values()]:
            if set(p._block_of) != set(worlds):
                raise ModelError("partition is over a different world set")
        object.__setattr__(self, "r_agent", agents)
        object.__setattr__(self, "valuation", _freeze_valuation(worlds, self.valuation))

    def holds(self, atom: str, w: str) -> bool:
        return w in self.valuation.get(atom, ())

    def require_world(self, w: str) -> None:
        if w not in self.worlds:
            raise ModelError(f"unknown world {w!r}")


@dataclass(frozen=True)
class ClpcModel:
    """Exclusive, complete control of the atom universe plus the true atoms."""

    n_agents: int
    control: Mapping[int, frozenset[str]]
    true_atoms: frozenset[str] = frozenset()

    def __post_init__(self):
        if not isinstance(self.n_agents, int) or self.n_agents < 1:
            raise ModelError("n_agents must be an integer >= 1")
        control = {int(i): frozenset(c) for i, c in dict(self.control).items()}
        extra = sorted(set(control) - set(range(1, self.n_agents + 1)))
        if extra:
            raise ModelError(f"control given for unknown agents {extra}")
        for i in range(1, self.n_agents + 1):
            control.setdefault(i, frozenset())
        owner: dict[str, int] = {}
        for i in sorted(control):
            for p in control[i]:
                if p in owner:
                    raise ModelError(
                        f"atom {p!r} is controlled by agents {owner[p]} and {i}"
                        " (control must be exclusive)"
                    )
                owner[p] = i
        object.__setattr__(self, "control", control)
        true_atoms = frozenset(self.true_atoms)
        stray = sorted(true_atoms - set(owner))
        if stray:
            raise ModelError(f"true atoms {stray} are not controlled by any agent")
        object.__setattr__(self, "true_atoms", true_atoms)

    @property
    def atoms(self) -> frozenset[str]:
        return frozenset().union(*self.control.values())

    def controlled_by(self, coalition: Iterable[int]) -> frozenset[str]:
        out = set()
        for i in coalition:
            if i not in self.control:
                raise ModelError(f"unknown agent {i}")
            out |= self.control[i]
        return frozenset(out)


# -- PECP ----------------------------------------------------------------------


def equiv_mod_x(m: PecpModel, x: Iterable[str], w: str, w2: str) -> bool:
    """w ~_X w2: the two worlds agree on every atom of X."""
    m.require_world(w)
    m.require_world(w2)
    return all(m.holds(p, w) == m.holds(p, w2) for p in x)


def equivalence_classes(m: PecpModel, x: Iterable[str]) -> Partition:
    x = sorted(set(x))
    return Partition.from_key(m.worlds, lambda w: tuple(m.holds(p, w) for p in x))


# -- STIT ----------------------------------------------------------------------


def coalition_relation(m: StitModel, j_set: Iterable[int]) -> Partition:
    j_set = sorted(set(j_set))
    for j in j_set:
        if j not in m.r_agent:
            raise ModelError(f"unknown agent {j}")
    if not j_set:
        return m.r_empty
    return meet(m.worlds, [m.r_empty] + [m.r_agent[j] for j in j_set])


def validate_stit(m: StitModel) -> list[str]:
    """Violations of refinement and independence; empty when valid."""
    problems = []
    for j in sorted(m.r_agent):
        for block in m.r_agent[j].blocks:
            homes = {m.r_empty.index_of(w) for w in block}
            if len(homes) > 1:
                problems.append(
                    f"refinement: agent {j} block {sorted(block)} straddles"
                    " several R_empty blocks"
                )
    if problems:
        return problems
    for moment in m.r_empty.blocks:
        choices = []
        for j in sorted(m.r_agent):
            choices.append(
                [b for b in m.r_agent[j].blocks if b & moment]
            )
        for pick in product(*choices):
            common = set(moment)
            for b in pick:
                common &= b
            if not common:
                listing = ", ".join(
                    f"agent {j}: {sorted(b)}" for j, b in zip(sorted(m.r_agent), pick)
                )
                problems.append(
                    f"independence: choices {{{listing}}} have empty intersection"
                )
    return problems


def require_valid_stit(m: StitModel) -> StitModel:
    problems = validate_stit(m)
    if problems:
        raise ModelError("; ".join(problems))
    return m


def _copy_name(w: str, agent: int, copy: int, taken: set[str]) -> str:
    name = f"{w}'{agent}.{copy}"
    while name in taken:
        name += "'"
    return name


def pad_choices(m: StitModel, target: int) -> StitModel:
    """Give every agent exactly ``target`` choices by adding disjoint copies of
    its first choice; copies carry the valuation of their originals.
    """
    if target < 1 or target & (target - 1):
        raise ModelError(f"target {target} is not a power of two")
    worst = max(len(p) for p in m.r_agent.values())
    if target < worst:
        raise ModelError(f"target {target} is below the {worst} choices already present")
    cur = m
    for j in range(1, m.n_agents + 1):
        k = len(cur.r_agent[j])
        if k == target:
            continue
        first = cur.r_agent[j].blocks[0]
        source = [w for w in cur.worlds if w in first]
        taken = set(cur.worlds)
        origin = {w: w for w in cur.worlds}
        new_worlds = list(cur.worlds)
        copy_blocks = []
        for ell in range(k + 1, target + 1):
            block = []
            for w in source:
                name = _copy_name(w, j, ell, taken)
                taken.add(name)
                origin[name] = w
                new_worlds.append(name)
                block.append(name)
            copy_blocks.append(block)

        def lift(p: Partition) -> Partition:
            return Partition.from_key(new_worlds, lambda w: p.index_of(origin[w]))

        r_agent = {}
        for i, p in cur.r_agent.items():
            if i == j:
                r_agent[i] = Partition(new_worlds, [*p.blocks, *copy_blocks])
            else:
                r_agent[i] = lift(p)
        valuation = {
            a: frozenset(w for w in new_worlds if origin[w] in cell)
            for a, cell in cur.valuation.items()
        }
        cur = StitModel(
            tuple(new_worlds), cur.n_agents, lift(cur.r_empty), r_agent, valuation
        )
    return cur


def rep_atom(agent: int, digit: int) -> str:
    return f"rep_{agent}_{digit}"


def stit_to_pecp_model(m: StitModel, m_digits: int) -> PecpModel:
    """Add rep atoms encoding, per agent, the index of the choice of each world.

    Choices are numbered 0..2^m-1 in first-seen world order and digit d is the
    d-th least significant bit of that number.
    """
    size = 2**m_digits
    for j, p in m.r_agent.items():
        if len(p) != size:
            raise ModelError(
                f"agent {j} has {len(p)} choices, expected exactly {size}; pad first"
            )
    clash = sorted(a for a in m.valuation if a.startswith("rep_"))
    if clash:
        raise ModelError(f"valuation already contains rep atoms {clash}")
    valuation = dict(m.valuation)
    for j, p in sorted(m.r_agent.items()):
        for d in range(1, m_digits + 1):
            valuation[rep_atom(j, d)] = frozenset(
                w for w in m.worlds if (p.index_of(w) >> (d - 1)) & 1
            )
    return PecpModel(m.worlds, valuation)


def pecp_to_stit_model(
    m: PecpModel, rep_scheme: Mapping[int, Sequence[str]]
) -> StitModel:
    """Choices of agent j are the classes of ~ over j's rep atoms; R_empty is
    the whole world set.
    """
    seen: dict[str, int] = {}
    for j, atoms in rep_scheme.items():
        for a in atoms:
            if a in seen:
                raise ModelError(f"rep atom {a!r} assigned to agents {seen[a]} and {j}")
            seen[a] = j
    n = max(rep_scheme) if rep_scheme else 1
    if set(rep_scheme) != set(range(1, n + 1)):
        raise ModelError("rep scheme must cover agents 1..n")
    r_agent = {
        j: Partition.from_key(
            m.worlds, lambda w, atoms=tuple(atoms): tuple(m.holds(a, w) for a in atoms)
        )
        for j, atoms in rep_scheme.items()
    }
    return StitModel(m.worlds, n, Partition.single(m.worlds), r_agent, m.valuation)


# -- CL-PC ----------------------------------------------------------------------


def clpc_update(m: ClpcModel, j_set: Iterable[int], new_j_atoms: Iterable[str]) -> ClpcModel:
    """M (+) X'_J: coalition J resets the atoms it controls to ``new_j_atoms``."""
    owned = m.controlled_by(j_set)
    new_j_atoms = frozenset(new_j_atoms)
    stray = sorted(new_j_atoms - owned)
    if stray:
        raise ModelError(f"atoms {stray} are outside the coalition's control")
    return ClpcModel(m.n_agents, m.control, (m.true_atoms - owned) | new_j_atoms)


def world_name(atoms: Iterable[str]) -> str:
    return "{" + ",".join(sorted(atoms)) + "}"


def clpc_to_stit_model(m: ClpcModel) -> tuple[StitModel, str]:
    """The STIT model whose worlds are all subsets of the atom universe."""
    universe = sorted(m.atoms)
    subsets = []
    for bits in product([False, True], repeat=len(universe)):
        subsets.append(frozenset(a for a, b in zip(universe, bits) if b))
    names = {s: world_name(s) for s in subsets}
    worlds = tuple(names[s] for s in subsets)
    back = {names[s]: s for s in subsets}
    r_agent = {
        i: Partition.from_key(worlds, lambda w, c=m.control[i]: back[w] & c)
        for i in range(1, m.n_agents + 1)
    }
    valuation = {a: frozenset(names[s] for s in subsets if a in s) for a in universe}
    stit = StitModel(worlds, m.n_agents, Partition.single(worlds), r_agent, valuation)
    return stit, names[m.true_atoms]


def bridge_violation(m: StitModel, w0: str, atoms: Iterable[str]) -> str | None:
    from paribus.semantics import eval_stit
    from paribus.translate import bridge_formulas

    f = bridge_formulas(m.n_agents, atoms)
    if not eval_stit(m, w0, f):
        return "the exclusivity/completeness/grid bridge formulas fail at " + repr(w0)
    return None


def stit_to_clpc_model(
    m: StitModel, w0: str, atoms: Iterable[str] | None = None
) -> ClpcModel:
    """Read off who controls what: agent i controls p when every choice of i
    settles p, checked throughout the moment of ``w0``.
    """
    from paribus.semantics import eval_stit

    m.require_world(w0)
    atoms = sorted(m.valuation) if atoms is None else sorted(atoms)
    problem = bridge_violation(m, w0, atoms)
    if problem:
        raise ModelError(f"not a CL-PC shaped STIT model: {problem}")
    moment = sorted(m.r_empty.block_of(w0))
    control = {}
    for i in range(1, m.n_agents + 1):
        owned = set()
        for p in atoms:
            settles = Or(StitBox({i}, Atom(p)), StitBox({i}, Not(Atom(p))))
            if all(eval_stit(m, v, settles) for v in moment):
                owned.add(p)
        control[i] = frozenset(owned)
    true_atoms = frozenset(p for p in atoms if m.holds(p, w0))
    result = ClpcModel(m.n_agents, control, true_atoms)
    if result.atoms != frozenset(atoms):
        raise ModelError("control is not complete over the atom set")
    return result


# -- JSON ----------------------------------------------------------------------

_KEYS = {
    "pecp": {"type", "worlds", "valuation"},
    "stit": {"type", "worlds", "n_agents", "r_empty", "r_agent", "valuation"},
    "clpc": {"type", "n_agents", "control", "true_atoms"},
}


def model_from_dict(data: dict):
    if not isinstance(data, dict) or "type" not in data:
        raise ModelError("model JSON must be an object with a 'type' key")
    kind = data["type"]
    if kind not in _KEYS:
        raise ModelError(f"unknown model type {kind!r}")
    unknown = sorted(set(data) - _KEYS[kind])
    if unknown:
        raise ModelError(f"unknown keys {unknown} in {kind} model")
    if kind == "pecp":
        return PecpModel(tuple(data["worlds"]), data.get("valuation", {}))
    if kind == "stit":
        worlds = tuple(data["worlds"])
        r_empty = Partition(worlds, data.get("r_empty", [worlds]))
        r_agent = {int(j): Partition(worlds, blocks) for j, blocks in data["r_agent"].items()}
        return StitModel(worlds, int(data["n_agents"]), r_empty, r_agent, data.get("valuation", {}))
    control = {int(i): atoms for i, atoms in data["control"].items()}
    return ClpcModel(int(data["n_agents"]), control, frozenset(data.get("true_atoms", [])))


def _blocks_json(p: Partition, worlds):
    order = {w: i for i, w in enumerate(worlds)}
    return [sorted(b, key=order.get) for b in p.blocks]


def _valuation_json(valuation, worlds):
    order = {w: i for i, w in enumerate(worlds)}
    return {a: sorted(c, key=order.get) for a, c in sorted(valuation.items()) if c}


def model_to_dict(m) -> dict:
    if isinstance(m, PecpModel):
        return {
            "type": "pecp",
            "worlds": list(m.worlds),
            "valuation": _valuation_json(m.valuation, m.worlds),
        }
    if isinstance(m, StitModel):
        return {
            "type": "stit",
            "worlds": list(m.worlds),
            "n_agents": m.n_agents,
            "r_empty": _blocks_json(m.r_empty, m.worlds),
            "r_agent": {str(j): _blocks_json(p, m.worlds) for j, p in sorted(m.r_agent.items())},
            "valuation": _valuation_json(m.valuation, m.worlds),
        }
    if isinstance(m, ClpcModel):
        return {
            "type": "clpc",
            "n_agents": m.n_agents,
            "control": {str(i): sorted(c) for i, c in sorted(m.control.items())},
            "true_atoms": sorted(m.true_atoms),
        }
    raise TypeError(f"not a model: {m!r}")


def load_model(path) -> PecpModel | StitModel | ClpcModel:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: invalid JSON: {exc}") from exc
    return model_from_dict(data)


def dump_model(m, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh, indent=2)
        fh.write("\n")
