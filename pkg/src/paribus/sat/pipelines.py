"""Translation-based decision procedures.  Every satisfiable answer carries a
witness in the source logic that has been re-checked by its evaluator.
"""

from __future__ import annotations

import logging
import time

from paribus.config import CapExceeded, limits
from paribus.models import (
    Partition,
    pecp_to_stit_model,
    require_valid_stit,
    stit_to_clpc_model,
    StitModel,
)
from paribus.sat.s5 import KernelError, sat_s5
from paribus.sat.verdict import SatVerdict
from paribus.semantics import eval_clpc, eval_pecp, eval_stit
from paribus.syntax import (
    And,
    Not,
    StitBox,
    agents_of,
    iter_dag,
    atoms_of,
    is_individual_stit,
    is_nested,
    language_of,
    length,
)
from paribus.translate import (
    RepScheme,
    clpc_digits,
    clpc_to_pecp,
    stit_to_pecp,
    tr,
    tr4_with_control,
)

log = logging.getLogger(__name__)


def _require_language(f, lang: str) -> None:
    found = language_of(f)
    if found not in (lang, None):
        raise ValueError(f"expected a {lang} formula, got {found}")


def sat_pecp(f, engine=None, mode: str = "auto") -> SatVerdict:
    """PECP satisfiability through the S5 translation."""
    start = time.perf_counter()
    _require_language(f, "pecp")
    verdict = sat_s5(tr(f), mode=mode, engine=engine)
    verdict.method = "pecp-via-s5"
    if verdict.satisfiable:
        model = verdict.witness.restrict_atoms(atoms_of(f))
        if not eval_pecp(model, verdict.world, f):
            raise KernelError("PECP witness fails self-verification")
        verdict.witness = model
    verdict.stats["wall_time"] = time.perf_counter() - start
    return verdict


def _strip_reps(m: StitModel) -> StitModel:
    keep = {a: c for a, c in m.valuation.items() if not a.startswith("rep_")}
    return StitModel(m.worlds, m.n_agents, m.r_empty, m.r_agent, keep)


def sat_stit_bounded(f, m_digits: int, n_agents: int | None = None, engine=None) -> SatVerdict:
    """Satisfiability in STIT models where each agent has at most 2^m choices."""
    start = time.perf_counter()
    _require_language(f, "stit")
    if m_digits < 1:
        raise ValueError("m_digits must be >= 1")
    n = n_agents or max(agents_of(f), default=1)
    verdict = sat_pecp(stit_to_pecp(f, m_digits, n), engine=engine)
    verdict.method = f"stit-bounded(m={m_digits})"
    if verdict.satisfiable:
        scheme = RepScheme(m_digits, n)
        stit = require_valid_stit(pecp_to_stit_model(verdict.witness, scheme.as_mapping()))
        stit = _strip_reps(stit)
        if not eval_stit(stit, verdict.world, f):
            raise KernelError("STIT witness fails self-verification")
        verdict.witness = stit
    verdict.stats["wall_time"] = time.perf_counter() - start
    verdict.stats["m_digits"] = m_digits
    return verdict


def rename_agents(f, mapping: dict[int, int]):
    """f with every coalition index renamed through ``mapping``."""
    out = {}
    for g in iter_dag(f):
        t = type(g)
        if t is StitBox:
            out[g] = StitBox({mapping[j] for j in g.coalition}, out[g.arg])
        elif t is Not:
            out[g] = Not(out[g.arg])
        elif t is And:
            out[g] = And(out[g.left], out[g.right])
        else:
            out[g] = g
    return out[f]


def _expand_agents(m: StitModel, used: list[int]) -> StitModel:
    """Undo compaction: agent k+1 of m becomes used[k]; others get one choice."""
    n = max(used)
    r_agent = {j: Partition.single(m.worlds) for j in range(1, n + 1)}
    for k, j in enumerate(used, 1):
        r_agent[j] = m.r_agent[k]
    return StitModel(m.worlds, n, m.r_empty, r_agent, m.valuation)


def sat_individual_stit(f, engine=None, shortcut: bool = True) -> SatVerdict:
    """Individual STIT satisfiability with the complete bound m = length(f).

    Agents are first renumbered 1..k; agents that do not occur only ever
    need a single choice, so this changes nothing but the encoding size.
    With ``shortcut`` the bounds 1, 2, 4, ... below length(f) are tried
    first; a model found there is also a model for the full bound.
    """
    if not is_individual_stit(f):
        raise ValueError("formula is not in the individual STIT fragment")
    used = sorted(agents_of(f)) or [1]
    g = rename_agents(f, {j: k for k, j in enumerate(used, 1)})
    m = length(f)
    n = len(used)
    bounds = []
    if shortcut:
        k = 1
        while k < m:
            bounds.append(k)
            k *= 2
    bounds.append(m)
    for k in bounds:
        if k == m and m * n > 8:
            log.warning(
                "individual STIT check with %d rep digits for %d agents may be slow", m, n
            )
        verdict = sat_stit_bounded(g, k, n, engine=engine)
        if verdict.satisfiable or k == m:
            break
    verdict.method = f"individual-stit(m={k})" if k == m else f"individual-stit(m={k}<{m})"
    if verdict.satisfiable:
        verdict.witness = _expand_agents(verdict.witness, used)
        if not eval_stit(verdict.witness, verdict.world, f):
            raise KernelError("STIT witness fails self-verification")
    return verdict


def sat_clpc_via_embedding(f, n_agents: int, atoms=None, engine=None) -> SatVerdict:
    """CL-PC satisfiability through the composite PECP formula."""
    start = time.perf_counter()
    _require_language(f, "clpc")
    atoms = sorted(atoms_of(f) if atoms is None else set(atoms))
    cap = limits().clpc_embedding_atoms
    if len(atoms) > cap:
        raise CapExceeded(f"CL-PC embedding limited to {cap} atoms")
    verdict = sat_pecp(clpc_to_pecp(f, n_agents, atoms), engine=engine)
    verdict.method = "clpc-via-pecp"
    if verdict.satisfiable:
        scheme = RepScheme(clpc_digits(atoms), n_agents)
        stit = require_valid_stit(pecp_to_stit_model(verdict.witness, scheme.as_mapping()))
        clpc = stit_to_clpc_model(stit, verdict.world, atoms)
        if not eval_clpc(clpc, f):
            raise KernelError("CL-PC witness fails self-verification")
        verdict.witness = clpc
        verdict.world = None
    verdict.stats["wall_time"] = time.perf_counter() - start
    return verdict


def sat_pecp_nested(f, engine=None) -> SatVerdict:
    """Nested-fragment PECP: emits the STIT formula tr4 & CONTROL as an
    artifact and decides with the general PECP procedure."""
    if not is_nested(f):
        raise ValueError("formula is not in the nested fragment")
    embedding = tr4_with_control(f)
    verdict = sat_pecp(f, engine=engine)
    verdict.method = "pecp-nested(fallback)"
    verdict.artifact = embedding
    return verdict
