"""Brute-force decision procedures, independent of the translations.

* PECP and S5: truth only depends on the set of valuations present, so
  enumerating nonempty sets of valuations over the relevant atoms is exact.
* STIT: a formula true at w is true in the submodel generated by w's
  R_empty class, so one-moment models suffice; the search covers every
  such model up to a world bound.
* CL-PC: models are exactly (control partition, true atoms) pairs.
"""

from __future__ import annotations

import time
from itertools import combinations, product

import numpy as np

from paribus.config import CapExceeded, limits
from paribus.models import ClpcModel, Partition, PecpModel, StitModel
from paribus.sat.verdict import SatVerdict, empty_stats
from paribus.semantics import PecpEvaluator, S5Evaluator, eval_clpc
from paribus.syntax import (
    And,
    Atom,
    Formula,
    Not,
    StitBox,
    Top,
    agents_of,
    atoms_of,
    iter_dag,
    language_of,
)


def sat_pecp_bruteforce(f: Formula, extra_atoms=(), max_atoms: int | None = None) -> SatVerdict:
    if language_of(f) not in ("pecp", None):
        raise ValueError("sat_pecp_bruteforce expects a PECP formula")
    return _valuation_sets(f, PecpEvaluator, "pecp-bruteforce", extra_atoms, max_atoms)


def sat_s5_bruteforce(f: Formula, max_atoms: int | None = None) -> SatVerdict:
    if language_of(f) not in ("s5", None):
        raise ValueError("sat_s5_bruteforce expects an S5 formula")
    return _valuation_sets(f, S5Evaluator, "s5-bruteforce", (), max_atoms)


def _valuation_sets(f, evaluator, method, extra_atoms, max_atoms) -> SatVerdict:
    start = time.perf_counter()
    atoms = sorted(atoms_of(f) | set(extra_atoms))
    cap = limits().pecp_oracle_atoms if max_atoms is None else max_atoms
    if len(atoms) > cap:
        raise CapExceeded(f"PECP oracle limited to {cap} atoms, formula has {len(atoms)}")
    valuations = list(product([True, False], repeat=len(atoms)))
    stats = empty_stats()
    tried = 0
    for size in range(1, len(valuations) + 1):
        for chosen in combinations(range(len(valuations)), size):
            tried += 1
            worlds = tuple(f"v{i}" for i in chosen)
            valuation = {
                a: {w for w, i in zip(worlds, chosen) if valuations[i][k]}
                for k, a in enumerate(atoms)
            }
            m = PecpModel(worlds, valuation)
            mask = evaluator(m).truth(f)
            if mask:
                first = (mask & -mask).bit_length() - 1
                stats.update(worlds_tried=tried, wall_time=time.perf_counter() - start)
                return SatVerdict(True, m, worlds[first], stats, method=method)
    stats.update(worlds_tried=tried, wall_time=time.perf_counter() - start)
    return SatVerdict(False, stats=stats, method=method)


# -- STIT ------------------------------------------------------------------------


def restricted_growth(n: int, max_blocks: int):
    """All set partitions of range(n) with at most max_blocks blocks, as
    restricted growth strings in lexicographic order."""
    if n == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(min(top + 2, max_blocks)):
            prefix.append(b)
            yield from rec(prefix, max(top, b))
            prefix.pop()

    yield from rec([0], 0)


def _independent(labelings: tuple[tuple[int, ...], ...]) -> bool:
    realised = set(zip(*labelings))
    sizes = [max(lab) + 1 for lab in labelings]
    total = 1
    for s in sizes:
        total *= s
    return len(realised) == total


def _stit_truth(f: Formula, labelings, atom_cols: dict[str, np.ndarray]) -> np.ndarray:
    """Truth of f for every valuation (rows) at every world (columns)."""
    shape = next(iter(atom_cols.values())).shape if atom_cols else (1, len(labelings[0]))
    blocks_cache: dict[frozenset, list[list[int]]] = {}

    def blocks(coalition):
        hit = blocks_cache.get(coalition)
        if hit is None:
            groups: dict[tuple, list[int]] = {}
            k = len(labelings[0])
            for w in range(k):
                key = tuple(labelings[j - 1][w] for j in sorted(coalition))
                groups.setdefault(key, []).append(w)
            hit = list(groups.values())
            blocks_cache[coalition] = hit
        return hit

    val: dict[Formula, np.ndarray] = {}
    for g in iter_dag(f):
        t = type(g)
        if t is Atom:
            val[g] = atom_cols[g.name]
        elif t is Top:
            val[g] = np.ones(shape, dtype=bool)
        elif t is Not:
            val[g] = ~val[g.arg]
        elif t is And:
            val[g] = val[g.left] & val[g.right]
        elif t is StitBox:
            a = val[g.arg]
            out = np.empty_like(a)
            for b in blocks(g.coalition):
                out[:, b] = a[:, b].all(axis=1)[:, None]
            val[g] = out
        else:
            raise ValueError(f"not a STIT node: {t.__name__}")
    return val[f]


def sat_stit_oracle(
    f: Formula,
    n_agents: int | None = None,
    max_choices: int | None = None,
    max_worlds: int | None = None,
) -> SatVerdict:
    """Search all one-moment STIT models with up to ``max_worlds`` worlds in
    which every agent has at most ``max_choices`` choices.

    Exact for formulas that, when satisfiable in this class, are satisfiable
    within the world bound; the verdict records the bound used.
    """
    start = time.perf_counter()
    if language_of(f) not in ("stit", None):
        raise ValueError("the STIT oracle expects a STIT formula")
    lim = limits()
    n = n_agents or max(agents_of(f), default=1)
    if agents_of(f) - set(range(1, n + 1)):
        raise ValueError("formula mentions agents beyond n_agents")
    atoms = sorted(atoms_of(f))
    k_max = lim.stit_oracle_worlds if max_worlds is None else max_worlds
    if n > lim.stit_oracle_agents:
        raise CapExceeded(f"STIT oracle limited to {lim.stit_oracle_agents} agents")
    if len(atoms) > lim.stit_oracle_atoms:
        raise CapExceeded(f"STIT oracle limited to {lim.stit_oracle_atoms} atoms")
    choices = k_max if max_choices is None else max_choices
    stats = empty_stats()
    tried = 0
    for k in range(1, k_max + 1):
        vals = np.array(list(product([False, True], repeat=len(atoms) * k)), dtype=bool)
        vals = vals.reshape(len(vals), len(atoms), k) if atoms else np.zeros((1, 0, k), bool)
        atom_cols = {a: vals[:, i, :] for i, a in enumerate(atoms)}
        parts = list(restricted_growth(k, choices))
        for labelings in product(parts, repeat=n):
            if not _independent(labelings):
                continue
            tried += 1
            truth = _stit_truth(f, labelings, atom_cols)
            hits = np.argwhere(truth)
            if len(hits):
                row, col = hits[0]
                model = _build_stit(k, n, labelings, atoms, vals[row])
                stats.update(worlds_tried=tried, wall_time=time.perf_counter() - start)
                return SatVerdict(True, model, model.worlds[col], stats, method="stit-oracle")
    stats.update(worlds_tried=tried, wall_time=time.perf_counter() - start)
    return SatVerdict(False, stats=stats, method="stit-oracle")


def _build_stit(k, n, labelings, atoms, row) -> StitModel:
    worlds = tuple(f"w{i}" for i in range(k))
    r_agent = {
        j: Partition.from_key(worlds, lambda w, lab=labelings[j - 1]: lab[worlds.index(w)])
        for j in range(1, n + 1)
    }
    valuation = {a: {worlds[w] for w in range(k) if row[i, w]} for i, a in enumerate(atoms)}
    return StitModel(worlds, n, Partition.single(worlds), r_agent, valuation)


# -- CL-PC -------------------------------------------------------------------------


def sat_clpc_direct(f: Formula, n_agents: int, atoms=None) -> SatVerdict:
    start = time.perf_counter()
    if language_of(f) not in ("clpc", None):
        raise ValueError("sat_clpc_direct expects a CL-PC formula")
    atoms = sorted(atoms_of(f) if atoms is None else set(atoms))
    if set(atoms_of(f)) - set(atoms):
        raise ValueError("formula atoms must be part of the atom universe")
    lim = limits()
    if len(atoms) > lim.clpc_oracle_atoms:
        raise CapExceeded(f"CL-PC oracle limited to {lim.clpc_oracle_atoms} atoms")
    if n_agents > lim.clpc_oracle_agents:
        raise CapExceeded(f"CL-PC oracle limited to {lim.clpc_oracle_agents} agents")
    if agents_of(f) - set(range(1, n_agents + 1)):
        raise ValueError("formula mentions agents beyond n_agents")
    stats = empty_stats()
    tried = 0
    for owners in product(range(1, n_agents + 1), repeat=len(atoms)):
        control = {i: {a for a, o in zip(atoms, owners) if o == i} for i in range(1, n_agents + 1)}
        for bits in product([False, True], repeat=len(atoms)):
            tried += 1
            m = ClpcModel(n_agents, control, frozenset(a for a, b in zip(atoms, bits) if b))
            if eval_clpc(m, f):
                stats.update(worlds_tried=tried, wall_time=time.perf_counter() - start)
                return SatVerdict(True, m, None, stats, method="clpc-direct")
    stats.update(worlds_tried=tried, wall_time=time.perf_counter() - start)
    return SatVerdict(False, stats=stats, method="clpc-direct")
