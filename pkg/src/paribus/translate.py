"""Formula-to-formula translations between PECP, S5, STIT and CL-PC, and the
generators for the grid, bridge and control formulas they rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

from paribus.config import CapExceeded, limits
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
    StitDiamond,
    Top,
    agents_of,
    atoms_of,
    check_reserved,
    conj,
    cube,
    disj,
    is_nested,
    iter_dag,
    match_box,
    signatures_in,
    subformulas,
)


def dag_size(f: Formula) -> int:
    """Number of distinct subterms; the size measure for translation outputs."""
    return sum(1 for _ in iter_dag(f))


def cases(x: Iterable[str]):
    """Cubes over X, one per subset pi of X, all-true case first."""
    x = sorted(set(x))
    for bits in product([True, False], repeat=len(x)):
        yield cube(
            [p for p, b in zip(x, bits) if b], [p for p, b in zip(x, bits) if not b]
        )


# -- PECP to S5 ------------------------------------------------------------------


class FreshAtomTable:
    """Names ``aux_1, aux_2, ...`` for the subformulas of a source formula."""

    PREFIX = "aux_"

    def __init__(self, source: Formula):
        check_reserved(source, self.PREFIX)
        self.source = source
        self.order = subformulas(source)
        self.mapping = {g: Atom(f"{self.PREFIX}{k}") for k, g in enumerate(self.order, 1)}

    def __getitem__(self, g: Formula) -> Atom:
        try:
            return self.mapping[g]
        except KeyError:
            raise KeyError(f"{g!r} is not a subformula of the table's source") from None

    def __len__(self):
        return len(self.mapping)


def _guarded_box(x: frozenset[str], body: Formula) -> Formula:
    if not x:
        return BoxAll(body)
    return conj(Imp(c, BoxAll(Imp(c, body))) for c in cases(x))


def tr1(f: Formula, table: FreshAtomTable) -> Formula:
    """One-step translation of a subformula; modal arguments become aux atoms."""
    t = type(f)
    if t in (Atom, Top):
        return f
    if t is Not:
        boxed = match_box(f)
        if boxed is not None:
            x, g = boxed
            return _guarded_box(x, table[g])
        return Not(tr1(f.arg, table))
    if t is And:
        return And(tr1(f.left, table), tr1(f.right, table))
    if t is Diamond:
        return Not(_guarded_box(f.signature, Not(table[f.arg])))
    raise ValueError(f"tr1 expects a PECP formula, got {t.__name__}")


def tr_with_table(f0: Formula) -> tuple[Formula, FreshAtomTable]:
    table = FreshAtomTable(f0)
    defs = [BoxAll(Iff(table[g], tr1(g, table))) for g in table.order]
    return And(table[f0], conj(defs)), table


def tr(f0: Formula) -> Formula:
    """Satisfiability-preserving PECP to S5 translation of single-exponential size."""
    return tr_with_table(f0)[0]


TR_SIZE_CONSTANT = 24


def tr_size_bound(f0: Formula) -> int:
    """C * |SF(f0)| * 2^(largest signature size)."""
    widest = max((len(x) for x in signatures_in(f0)), default=0)
    return TR_SIZE_CONSTANT * len(subformulas(f0)) * 2**widest


def reduce_rewrite(f: Formula, max_nodes: int | None = None) -> Formula:
    """Rewrite innermost-first until every signature is empty.

    Raises CapExceeded once an intermediate result exceeds ``max_nodes``
    distinct subterms (the blow-up is non-elementary in modal depth).
    """
    from paribus.semantics import reduce_rhs

    cap = limits().reduce_nodes if max_nodes is None else max_nodes
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = type(g)
        boxed = match_box(g)
        if boxed is not None and boxed[0]:
            out = reduce_rhs(boxed[0], go(boxed[1]))
        elif t is Not:
            out = Not(go(g.arg))
        elif t is And:
            out = And(go(g.left), go(g.right))
        elif t is Diamond:
            inner = go(g.arg)
            if g.signature:
                out = Not(reduce_rhs(g.signature, Not(inner)))
            else:
                out = Diamond((), inner)
        else:
            out = g
        if out._len > cap and dag_size(out) > cap:
            raise CapExceeded(f"reduce_rewrite output exceeds {cap} nodes")
        memo[g] = out
        return out

    return go(f)


# -- STIT to PECP -----------------------------------------------------------------


@dataclass(frozen=True)
class RepScheme:
    """rep_j_1 .. rep_j_m for each agent j in 1..n."""

    m_digits: int
    n_agents: int

    def __post_init__(self):
        if self.m_digits < 1:
            raise ValueError("m_digits must be >= 1")
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")

    def agent_atoms(self, j: int) -> list[str]:
        if not 1 <= j <= self.n_agents:
            raise ValueError(f"agent {j} is not covered by the rep scheme (1..{self.n_agents})")
        return [f"rep_{j}_{d}" for d in range(1, self.m_digits + 1)]

    def all_atoms(self) -> list[str]:
        return [a for j in range(1, self.n_agents + 1) for a in self.agent_atoms(j)]

    def as_mapping(self) -> dict[int, list[str]]:
        return {j: self.agent_atoms(j) for j in range(1, self.n_agents + 1)}

    def coalition_atoms(self, coalition: Iterable[int]) -> frozenset[str]:
        return frozenset(a for j in coalition for a in self.agent_atoms(j))


def grid_m(scheme: RepScheme) -> Formula:
    """Every single-digit flip of the rep atoms is realised somewhere."""
    from paribus.syntax import Box

    rep = scheme.all_atoms()
    parts = []
    for x in rep:
        rest = frozenset(rep) - {x}
        a = Atom(x)
        body = And(Imp(a, Diamond(rest, Not(a))), Imp(Not(a), Diamond(rest, a)))
        parts.append(Box((), body))
    return conj(parts)


def tr2(f: Formula, scheme: RepScheme) -> Formula:
    """[J:stit] becomes [rep atoms of J]; booleans are kept."""
    check_reserved(f, "rep_")
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = type(g)
        if t in (Atom, Top):
            out = g
        elif t is Not:
            out = Not(go(g.arg))
        elif t is And:
            out = And(go(g.left), go(g.right))
        elif t is StitBox:
            x = scheme.coalition_atoms(g.coalition)
            out = Not(Diamond(x, Not(go(g.arg))))
        else:
            raise ValueError(f"tr2 expects a STIT formula, got {t.__name__}")
        memo[g] = out
        return out

    return go(f)


def stit_to_pecp(f: Formula, m_digits: int, n_agents: int | None = None) -> Formula:
    """GRID_m & tr2(f), the PECP formula deciding m-bounded STIT satisfiability."""
    n = n_agents or max(agents_of(f), default=1)
    scheme = RepScheme(m_digits, n)
    return And(grid_m(scheme), tr2(f, scheme))


# -- CL-PC to STIT ------------------------------------------------------------------


def _coalition_diamond(j: Iterable[int], f: Formula) -> Formula:
    return StitDiamond(j, f)


def bridge_parts(n_agents: int, atoms: Iterable[str]) -> dict[str, Formula]:
    atoms = sorted(set(atoms))
    cap = limits().bridge_atoms
    if len(atoms) > cap:
        raise CapExceeded(
            f"bridge formulas over {len(atoms)} atoms exceed the cap of {cap}"
            " (GRID* has 2^|atoms| conjuncts)"
        )
    agents = range(1, n_agents + 1)
    pairs = [(i, j) for i in agents for j in agents if i != j]
    exc_plus, exc_minus, compl = [], [], []
    for name in atoms:
        p = Atom(name)
        for i, j in pairs:
            forced_i = _coalition_diamond((), StitBox({i}, p))
            exc_plus.append(Imp(forced_i, Not(_coalition_diamond((), StitBox({j}, p)))))
            exc_minus.append(
                Imp(forced_i, Not(_coalition_diamond((), StitBox({j}, Not(p)))))
            )
        settles = [Or(StitBox({i}, p), StitBox({i}, Not(p))) for i in agents]
        compl.append(disj(StitBox((), s) for s in settles))
    grid_star = []
    for bits in product([True, False], repeat=len(atoms)):
        pos = [a for a, b in zip(atoms, bits) if b]
        neg = [a for a, b in zip(atoms, bits) if not b]
        grid_star.append(_coalition_diamond((), cube(pos, neg)))
    return {
        "EXC+": conj(exc_plus),
        "EXC-": conj(exc_minus),
        "COMPL": conj(compl),
        "GRID*": conj(grid_star),
    }


def bridge_formulas(n_agents: int, atoms: Iterable[str]) -> Formula:
    """EXC+ & EXC- & COMPL & GRID*: the STIT model behaves like a CL-PC model."""
    parts = bridge_parts(n_agents, atoms)
    return conj([parts["EXC+"], parts["EXC-"], parts["COMPL"], parts["GRID*"]])


def tr3(f: Formula, n_agents: int) -> Formula:
    """dia J becomes <AGT minus J : stit>."""
    everyone = frozenset(range(1, n_agents + 1))
    stray = sorted(agents_of(f) - everyone)
    if stray:
        raise ValueError(f"agents {stray} are outside 1..{n_agents}")
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = type(g)
        if t in (Atom, Top):
            out = g
        elif t is Not:
            out = Not(go(g.arg))
        elif t is And:
            out = And(go(g.left), go(g.right))
        elif t is CoopDiamond:
            out = StitDiamond(everyone - g.coalition, go(g.arg))
        else:
            raise ValueError(f"tr3 expects a CL-PC formula, got {t.__name__}")
        memo[g] = out
        return out

    return go(f)


def clpc_to_stit(f: Formula, n_agents: int, atoms: Iterable[str]) -> Formula:
    atoms = set(atoms)
    stray = sorted(atoms_of(f) - atoms)
    if stray:
        raise ValueError(f"formula atoms {stray} are missing from the atom universe")
    return And(bridge_formulas(n_agents, atoms), tr3(f, n_agents))


def clpc_digits(atoms: Iterable[str]) -> int:
    """Digits per agent for the CL-PC embedding: |atoms|, and at least one."""
    return max(1, len(set(atoms)))


def clpc_to_pecp(f: Formula, n_agents: int, atoms: Iterable[str]) -> Formula:
    """GRID_m & tr2(bridges & tr3(f)) with m = |atoms|."""
    atoms = set(atoms)
    check_reserved(f, "rep_")
    scheme = RepScheme(clpc_digits(atoms), n_agents)
    return And(grid_m(scheme), tr2(clpc_to_stit(f, n_agents, atoms), scheme))


# -- nested PECP to STIT --------------------------------------------------------------


@dataclass(frozen=True)
class NestedEmbedding:
    formula: Formula
    agent_of: Mapping[str, int]
    coalition_of: Mapping[frozenset, frozenset]
    n_agents: int


def tr4_with_control(f: Formula) -> NestedEmbedding:
    """[X] becomes [A_X:stit] with one fresh agent per signature atom; the
    CONTROL conjunct ties each A_X choice to the atoms of X.
    """
    if not is_nested(f):
        raise ValueError("formula is not in the nested fragment (signatures are not a chain)")
    sigs = sorted(signatures_in(f), key=lambda s: (len(s), sorted(s)))
    sig_atoms = sorted(set().union(*sigs)) if sigs else []
    agent_of = {p: k for k, p in enumerate(sig_atoms, 1)}
    coalition_of = {x: frozenset(agent_of[p] for p in x) for x in sigs}
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = type(g)
        boxed = match_box(g)
        if boxed is not None:
            out = StitBox(coalition_of[boxed[0]], go(boxed[1]))
        elif t in (Atom, Top):
            out = g
        elif t is Not:
            out = Not(go(g.arg))
        elif t is And:
            out = And(go(g.left), go(g.right))
        elif t is Diamond:
            out = StitDiamond(coalition_of[g.signature], go(g.arg))
        else:
            raise ValueError(f"tr4 expects a PECP formula, got {t.__name__}")
        memo[g] = out
        return out

    ties = []
    for x in sigs:
        a_x = coalition_of[x]
        for name in sorted(x):
            p = Atom(name)
            ties.append(Iff(p, StitBox(a_x, p)))
            ties.append(Iff(Not(p), StitBox(a_x, Not(p))))
    control = StitBox((), conj(ties) if ties else TOP)
    return NestedEmbedding(
        And(go(f), control), agent_of, coalition_of, max(1, len(sig_atoms))
    )
