"""S5 satisfiability by reduction to propositional SAT.

``[]`` is the universal modality, so every box has one truth value shared by
all worlds.  The kernel gives each box a global variable ``g`` and adds

* ``g -> body`` at every world, for boxes occurring positively, and
* ``~g -> ~body`` at some world, for boxes occurring negatively.

Two world layouts are available, both exact:

``generic``
    One root world plus one witness world per negatively occurring box, each
    with its own atom variables (the usual polynomial-size model bound).

``enumerate``
    Top-level conjuncts of the shape ``[](a <-> psi)`` define the atom ``a``;
    such atoms are inlined.  Worlds range over all valuations of the
    remaining free atoms, each with a presence variable.  Boolean structure
    then folds to constants inside each world, which keeps the case splits
    produced by the PECP translation cheap.

``auto`` picks whichever layout is expected to be smaller.  Satisfiable
answers always come with a model that is re-checked by the S5 evaluator.
"""

from __future__ import annotations

import time
from itertools import product

from paribus.config import limits
from paribus.models import PecpModel
from paribus.sat.cnf import FALSE, TRUE, CnfBuilder
from paribus.sat.dpll import solve
from paribus.sat.verdict import SatVerdict, empty_stats
from paribus.semantics import S5Evaluator
from paribus.syntax import (
    TOP,
    And,
    Atom,
    BoxAll,
    Formula,
    Not,
    Top,
    atoms_of,
    conj,
    iter_dag,
    language_of,
    match_iff,
)

POS, NEG = 1, 2


class KernelError(AssertionError):
    """The kernel produced a witness that does not satisfy the formula."""


def top_conjuncts(f: Formula) -> list[Formula]:
    out, stack = [], [f]
    while stack:
        g = stack.pop()
        if type(g) is And:
            stack.append(g.right)
            stack.append(g.left)
        elif type(g) is not Top:
            out.append(g)
    return out


def find_definitions(conjuncts: list[Formula]):
    """Acyclic definitions ``[](a <-> psi)`` among the top-level conjuncts.

    Returns (defs, order, used) with ``order`` a dependency order of the
    defined atoms and ``used`` the conjuncts consumed as definitions.
    """
    cand: dict[str, tuple[Formula, Formula]] = {}
    for c in conjuncts:
        if type(c) is not BoxAll:
            continue
        pair = match_iff(c.arg)
        if pair is None or type(pair[0]) is not Atom:
            continue
        name = pair[0].name
        if name not in cand:
            cand[name] = (pair[1], c)
    deps = {a: atoms_of(psi) & cand.keys() for a, (psi, _) in cand.items()}
    order: list[str] = []
    done: set[str] = set()
    pending = sorted(cand)
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for a in pending:
            if deps[a] <= done:
                order.append(a)
                done.add(a)
                progress = True
            else:
                rest.append(a)
        pending = rest
    defs = {a: cand[a][0] for a in order}
    used = {cand[a][1] for a in order}
    return defs, order, used


def _flip(p: int) -> int:
    return ((p & POS) << 1) | ((p & NEG) >> 1)


def polarities(roots: list[Formula], defs: dict[str, Formula]) -> dict[Formula, int]:
    """Occurrence polarity of every node, looking through defined atoms."""
    pol: dict[Formula, int] = {}
    stack = [(r, POS) for r in roots]
    while stack:
        node, p = stack.pop()
        new = p & ~pol.get(node, 0)
        if not new:
            continue
        pol[node] = pol.get(node, 0) | new
        t = type(node)
        if t is Not:
            stack.append((node.arg, _flip(new)))
        elif t is And:
            stack.append((node.left, new))
            stack.append((node.right, new))
        elif t is BoxAll:
            stack.append((node.arg, new))
        elif t is Atom and node.name in defs:
            stack.append((defs[node.name], new))
    return pol


class _WorldEval:
    """Symbolic value of formulas at one world, as literals or constants."""

    def __init__(self, builder: CnfBuilder, env: dict, defs: dict, gvar: dict):
        self.b = builder
        self.env = env
        self.defs = defs
        self.gvar = gvar
        self.memo: dict[Formula, object] = {}

    def value(self, f: Formula):
        memo = self.memo
        if f in memo:
            return memo[f]
        stack = [(f, False)]
        while stack:
            node, ready = stack.pop()
            if node in memo:
                continue
            t = type(node)
            if t is Atom:
                if node.name in self.defs:
                    d = self.defs[node.name]
                    if d in memo:
                        memo[node] = memo[d]
                    elif ready:
                        raise RuntimeError("definition cycle")
                    else:
                        stack.append((node, True))
                        stack.append((d, False))
                else:
                    memo[node] = self.env[node.name]
            elif t is Top:
                memo[node] = TRUE
            elif t is BoxAll:
                memo[node] = self.gvar[node]
            elif t is Not:
                if node.arg in memo:
                    memo[node] = self.b.neg(memo[node.arg])
                else:
                    stack.append((node, True))
                    stack.append((node.arg, False))
            elif t is And:
                l, r = node.left, node.right
                if l in memo and r in memo:
                    memo[node] = self.b.and_([memo[l], memo[r]])
                else:
                    stack.append((node, True))
                    if r not in memo:
                        stack.append((r, False))
                    if l not in memo:
                        stack.append((l, False))
            else:
                raise ValueError(f"not an S5 formula node: {t.__name__}")
        return memo[f]


def choose_mode(n_free: int, n_witness: int) -> str:
    if n_free > limits().s5_enumeration_atoms:
        return "generic"
    return "enumerate" if 2**n_free <= max(64, 4 * (n_witness + 1)) else "generic"


def sat_s5(f: Formula, mode: str = "auto", engine=None) -> SatVerdict:
    """Decide S5 satisfiability of f; the witness is a PecpModel."""
    start = time.perf_counter()
    if language_of(f) not in ("s5", None):
        raise ValueError("sat_s5 expects an S5 formula")
    conjuncts = top_conjuncts(f)
    if mode == "generic":
        defs, order, used = {}, [], set()
    else:
        defs, order, used = find_definitions(conjuncts)
    residual = [c for c in conjuncts if c not in used]
    roots = residual or [TOP]
    pol = polarities(roots, defs)
    boxes = [g for g in iter_dag(conj(roots + [defs[a] for a in order])) if type(g) is BoxAll and pol.get(g)]
    negative = [m for m in boxes if pol[m] & NEG]
    free = sorted(atoms_of(f) - set(defs))
    if mode == "auto":
        mode = choose_mode(len(free), len(negative))
    if mode not in ("enumerate", "generic"):
        raise ValueError(f"unknown S5 kernel mode {mode!r}")

    b = CnfBuilder()
    gvar = {m: b.var(("box", m)) for m in boxes}
    body = conj(roots)

    if mode == "enumerate":
        valuations = list(product([False, True], repeat=len(free)))
        presence = [b.var(("present", i)) for i in range(len(valuations))]
        evals = [
            _WorldEval(b, {a: (TRUE if v else FALSE) for a, v in zip(free, val)}, defs, gvar)
            for val in valuations
        ]
        for m in boxes:
            vals = [ev.value(m.arg) for ev in evals]
            if pol[m] & POS:
                for e, v in zip(presence, vals):
                    b.clause([-gvar[m], -e, v])
            if pol[m] & NEG:
                lits = []
                for e, v in zip(presence, vals):
                    nv = b.neg(v)
                    if nv == FALSE:
                        continue
                    if nv == TRUE:
                        lits.append(e)
                    else:
                        lits.append(b.and_([e, nv]))
                b.clause([gvar[m]] + lits)
        roots_lit = []
        for e, ev in zip(presence, evals):
            v = ev.value(body)
            if v == FALSE:
                continue
            roots_lit.append(e if v == TRUE else b.and_([e, v]))
        b.clause(roots_lit)
        b.inst.branch_first = [(gvar[m], True) for m in boxes] + [(e, True) for e in presence]
        world_env = None
    else:
        n_worlds = 1 + len(negative)
        envs = [
            {a: b.var(("atom", i, a)) for a in free} for i in range(n_worlds)
        ]
        evals = [_WorldEval(b, env, defs, gvar) for env in envs]
        witness_of = {m: i for i, m in enumerate(negative, 1)}
        for m in boxes:
            if pol[m] & POS:
                for ev in evals:
                    b.clause([-gvar[m], ev.value(m.arg)])
            if pol[m] & NEG:
                b.clause([gvar[m], b.neg(evals[witness_of[m]].value(m.arg))])
        b.clause([evals[0].value(body)])
        b.inst.branch_first = [(gvar[m], True) for m in boxes]
        world_env = envs

    inst = b.inst
    result = solve(inst, engine)
    stats = empty_stats()
    stats.update(
        worlds_tried=len(evals),
        sat_variables=inst.num_vars,
        sat_clauses=len(inst.clauses),
        decisions=result.decisions,
        mode=mode,
    )
    if not result.satisfiable:
        stats["wall_time"] = time.perf_counter() - start
        return SatVerdict(False, stats=stats, method=f"s5-{mode}")

    asg = result.assignment

    def lit_true(lit) -> bool:
        if lit == TRUE:
            return True
        if lit == FALSE:
            return False
        return asg[abs(lit)] == (lit > 0)

    rows: list[dict[str, bool]] = []
    root_index = None
    if mode == "enumerate":
        for i, (e, ev) in enumerate(zip(presence, evals)):
            if not asg[e]:
                continue
            if root_index is None and lit_true(ev.value(body)):
                root_index = len(rows)
            rows.append(dict(zip(free, valuations[i])))
    else:
        for env in world_env:
            rows.append({a: asg[v] for a, v in env.items()})
        root_index = 0
    model = complete_definitions(rows, free, defs, order)
    world = model.worlds[root_index]
    if not S5Evaluator(model).holds(world, f):
        raise KernelError(f"S5 witness fails to satisfy {f!r}")
    stats["wall_time"] = time.perf_counter() - start
    return SatVerdict(True, model, world, stats, method=f"s5-{mode}")


def complete_definitions(rows, free, defs, order) -> PecpModel:
    """Model over the free atoms, extended by evaluating each definition."""
    worlds = tuple(f"w{i}" for i in range(len(rows)))
    valuation = {
        a: {w for w, row in zip(worlds, rows) if row[a]} for a in free
    }
    for a in order:
        ev = S5Evaluator(PecpModel(worlds, valuation))
        mask = ev.truth(defs[a])
        valuation[a] = {w for i, w in enumerate(worlds) if mask >> i & 1}
    return PecpModel(worlds, valuation)
