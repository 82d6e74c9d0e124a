"""Model checking for PECP, STIT, CL-PC and S5, plus executable axiom instances.

The Kripke-style evaluators compute, bottom up, the set of worlds where each
subformula holds, represented as an integer bitmask over the model's ordered
world list.  Each boolean and modal clause is a method so tests can swap in
deliberately broken clauses and check that the law suites notice.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable

from paribus.models import (
    ClpcModel,
    ModelError,
    PecpModel,
    StitModel,
    clpc_update,
    coalition_relation,
    equivalence_classes,
)
from paribus.syntax import (
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
    Top,
    atoms_of,
    conj,
    cube,
    iter_dag,
    language_of,
)


class KripkeEvaluator:
    """Truth sets over a fixed world list; subclasses supply the modality."""

    def __init__(self, worlds: Iterable[str], valuation):
        self.worlds = tuple(worlds)
        self.index = {w: i for i, w in enumerate(self.worlds)}
        self.full = (1 << len(self.worlds)) - 1
        self.valuation = valuation
        self._cache: dict[Formula, int] = {}

    def mask_of(self, worlds: Iterable[str]) -> int:
        out = 0
        for w in worlds:
            out |= 1 << self.index[w]
        return out

    def blocks_to_masks(self, blocks) -> list[int]:
        return [self.mask_of(b) for b in blocks]

    # clauses -----------------------------------------------------------
    def atom(self, name: str) -> int:
        return self.mask_of(self.valuation.get(name, ()))

    def top(self) -> int:
        return self.full

    def neg(self, a: int) -> int:
        return self.full & ~a

    def conj(self, a: int, b: int) -> int:
        return a & b

    def modal(self, node: Formula, a: int) -> int:
        raise ValueError(
            f"{type(self).__name__} cannot interpret {type(node).__name__} modalities"
        )

    # driver ------------------------------------------------------------
    def truth(self, f: Formula) -> int:
        cache = self._cache
        if f in cache:
            return cache[f]
        for g in iter_dag(f):
            if g in cache:
                continue
            t = type(g)
            if t is Atom:
                val = self.atom(g.name)
            elif t is Top:
                val = self.top()
            elif t is Not:
                val = self.neg(cache[g.arg])
            elif t is And:
                val = self.conj(cache[g.left], cache[g.right])
            else:
                val = self.modal(g, cache[g.arg])
            cache[g] = val
        return cache[f]

    def holds(self, w: str, f: Formula) -> bool:
        if w not in self.index:
            raise ModelError(f"unknown world {w!r}")
        return bool(self.truth(f) >> self.index[w] & 1)

    def valid(self, f: Formula) -> bool:
        return self.truth(f) == self.full


def union_of_hit(blocks: list[int], a: int) -> int:
    """Union of the blocks meeting ``a``."""
    out = 0
    for b in blocks:
        if b & a:
            out |= b
    return out


def union_of_inside(blocks: list[int], a: int) -> int:
    """Union of the blocks contained in ``a``."""
    out = 0
    for b in blocks:
        if b & a == b:
            out |= b
    return out


class PecpEvaluator(KripkeEvaluator):
    def __init__(self, m: PecpModel):
        super().__init__(m.worlds, m.valuation)
        self.model = m
        self._classes: dict[frozenset, list[int]] = {}

    def classes(self, signature: frozenset[str]) -> list[int]:
        hit = self._classes.get(signature)
        if hit is None:
            hit = self.blocks_to_masks(equivalence_classes(self.model, signature).blocks)
            self._classes[signature] = hit
        return hit

    def diamond(self, signature: frozenset[str], a: int) -> int:
        return union_of_hit(self.classes(signature), a)

    def modal(self, node, a):
        if type(node) is Diamond:
            return self.diamond(node.signature, a)
        return super().modal(node, a)


class S5Evaluator(KripkeEvaluator):
    def __init__(self, m: PecpModel):
        super().__init__(m.worlds, m.valuation)

    def box_all(self, a: int) -> int:
        return self.full if a == self.full else 0

    def modal(self, node, a):
        if type(node) is BoxAll:
            return self.box_all(a)
        return super().modal(node, a)


class StitEvaluator(KripkeEvaluator):
    def __init__(self, m: StitModel):
        super().__init__(m.worlds, m.valuation)
        self.model = m
        self._blocks: dict[frozenset, list[int]] = {}

    def blocks(self, coalition: frozenset[int]) -> list[int]:
        hit = self._blocks.get(coalition)
        if hit is None:
            hit = self.blocks_to_masks(coalition_relation(self.model, coalition).blocks)
            self._blocks[coalition] = hit
        return hit

    def stit_box(self, coalition: frozenset[int], a: int) -> int:
        return union_of_inside(self.blocks(coalition), a)

    def modal(self, node, a):
        if type(node) is StitBox:
            return self.stit_box(node.coalition, a)
        return super().modal(node, a)


def eval_pecp(m: PecpModel, w: str, f: Formula) -> bool:
    return PecpEvaluator(m).holds(w, f)


def eval_s5(m: PecpModel, w: str, f: Formula) -> bool:
    return S5Evaluator(m).holds(w, f)


def eval_stit(m: StitModel, w: str, f: Formula) -> bool:
    return StitEvaluator(m).holds(w, f)


def evaluator_for(m, f: Formula | None = None) -> KripkeEvaluator:
    if isinstance(m, StitModel):
        return StitEvaluator(m)
    if isinstance(m, PecpModel):
        if f is not None and language_of(f) == "s5":
            return S5Evaluator(m)
        return PecpEvaluator(m)
    raise TypeError(f"no Kripke evaluator for {type(m).__name__}")


def valid_in_model(m, f: Formula, evaluator: KripkeEvaluator | None = None) -> bool:
    """f holds at every world of m (PECP, S5-over-PECP or STIT models)."""
    ev = evaluator or evaluator_for(m, f)
    return ev.valid(f)


# -- CL-PC ---------------------------------------------------------------------


def eval_clpc(m: ClpcModel, f: Formula) -> bool:
    """Truth of f in m; ``dia J g`` tries every reassignment of J's atoms."""
    stray = sorted(atoms_of(f) - m.atoms)
    if stray:
        raise ModelError(f"atoms {stray} are not in the model's atom universe")
    memo: dict[tuple[frozenset, Formula], bool] = {}

    def go(state: frozenset, g: Formula) -> bool:
        key = (state, g)
        hit = memo.get(key)
        if hit is not None:
            return hit
        t = type(g)
        if t is Atom:
            val = g.name in state
        elif t is Top:
            val = True
        elif t is Not:
            val = not go(state, g.arg)
        elif t is And:
            val = go(state, g.left) and go(state, g.right)
        elif t is CoopDiamond:
            owned = sorted(m.controlled_by(g.coalition))
            base = state - frozenset(owned)
            val = False
            for bits in product([False, True], repeat=len(owned)):
                chosen = frozenset(p for p, b in zip(owned, bits) if b)
                if go(base | chosen, g.arg):
                    val = True
                    break
        else:
            raise ValueError(f"not a CL-PC formula node: {t.__name__}")
        memo[key] = val
        return val

    return go(m.true_atoms, f)


def eval_clpc_by_update(m: ClpcModel, f: Formula) -> bool:
    """Unmemoised reference evaluator that goes through ``clpc_update``."""
    t = type(f)
    if t is Atom:
        return f.name in m.true_atoms
    if t is Top:
        return True
    if t is Not:
        return not eval_clpc_by_update(m, f.arg)
    if t is And:
        return eval_clpc_by_update(m, f.left) and eval_clpc_by_update(m, f.right)
    if t is CoopDiamond:
        owned = sorted(m.controlled_by(f.coalition))
        for bits in product([False, True], repeat=len(owned)):
            chosen = {p for p, b in zip(owned, bits) if b}
            if eval_clpc_by_update(clpc_update(m, f.coalition, chosen), f.arg):
                return True
        return False
    raise ValueError(f"not a CL-PC formula node: {t.__name__}")


# -- axiom instances ---------------------------------------------------------------


def reduce_rhs(x: Iterable[str], f: Formula) -> Formula:
    """The case split equivalent to ``[X] f`` using only ``[{}]``."""
    from paribus.syntax import Box

    x = sorted(set(x))
    parts = []
    for bits in product([True, False], repeat=len(x)):
        pos = [p for p, b in zip(x, bits) if b]
        neg = [p for p, b in zip(x, bits) if not b]
        case = cube(pos, neg)
        parts.append(Imp(case, Box((), Imp(case, f))))
    return conj(parts)


def reduce_instance(x: Iterable[str], f: Formula) -> Formula:
    from paribus.syntax import Box

    return Iff(Box(x, f), reduce_rhs(x, f))


def atom_split_instance(p: str, f: Formula) -> Formula:
    a = Atom(p)
    rhs = Or(
        And(a, Diamond((), And(a, f))),
        And(Not(a), Diamond((), And(Not(a), f))),
    )
    return Iff(Diamond({p}, f), rhs)


def check_reduce_instance(
    m: PecpModel, x: Iterable[str], f: Formula, evaluator: PecpEvaluator | None = None
) -> bool:
    """Whether the Reduce biconditional for (X, f) is valid in m."""
    return valid_in_model(m, reduce_instance(x, f), evaluator or PecpEvaluator(m))


def check_atom_split_instance(
    m: PecpModel, p: str, f: Formula, evaluator: PecpEvaluator | None = None
) -> bool:
    """Whether the single-atom case split for ``<{p}> f`` is valid in m."""
    return valid_in_model(m, atom_split_instance(p, f), evaluator or PecpEvaluator(m))


def s5_instances(f: Formula) -> dict[str, Formula]:
    """T, 4 and 5 for the global modality ``[{}]``."""
    from paribus.syntax import Box

    def box(g):
        return Box((), g)

    def dia(g):
        return Diamond((), g)

    return {
        "T": Imp(f, dia(f)),
        "4": Imp(box(f), box(box(f))),
        "5": Imp(dia(f), box(dia(f))),
    }
