"""Formula trees for the four languages and the structural queries on them.

All four languages share the boolean core ``Atom``, ``Top``, ``Not`` and
``And``.  Each adds one primitive modality:

* PECP: ``Diamond(signature, f)`` -- ``<X> f``
* STIT: ``StitBox(coalition, f)`` -- ``[J:stit] f``
* CL-PC: ``CoopDiamond(coalition, f)`` -- ``dia J f``
* S5: ``BoxAll(f)`` -- ``[] f``

Disjunction, implication, equivalence and the dual modalities are built by
the sugar functions below and never appear as nodes of their own, so two
formulas are equal exactly when their desugared trees are equal.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator

ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
RESERVED_PREFIXES = ("rep_", "aux_")


class Formula:
    __slots__ = ("_key", "_hash", "_len")

    def _init(self, key: tuple, size: int) -> None:
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + key))
        object.__setattr__(self, "_len", size)

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(self) is type(other)
            and self._hash == other._hash
            and self._key == other._key
        )

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (type(self), self._key)

    @property
    def children(self) -> tuple["Formula", ...]:
        return ()

    def __repr__(self) -> str:
        from paribus.parsing import to_text

        return f"<{type(self).__name__} {to_text(self)}>"


class Atom(Formula):
    __slots__ = ()

    def __init__(self, name: str):
        if not isinstance(name, str) or not ATOM_RE.match(name):
            raise ValueError(f"invalid atom name {name!r}")
        self._init((name,), 1)

    @property
    def name(self) -> str:
        return self._key[0]


class Top(Formula):
    __slots__ = ()

    def __init__(self):
        self._init((), 1)


class Not(Formula):
    __slots__ = ()

    def __init__(self, arg: Formula):
        self._init((arg,), arg._len + 1)

    @property
    def arg(self) -> Formula:
        return self._key[0]

    @property
    def children(self):
        return self._key


class And(Formula):
    __slots__ = ()

    def __init__(self, left: Formula, right: Formula):
        self._init((left, right), left._len + right._len + 1)

    @property
    def left(self) -> Formula:
        return self._key[0]

    @property
    def right(self) -> Formula:
        return self._key[1]

    @property
    def children(self):
        return self._key


class _Modal(Formula):
    """A modality indexed by a finite set (atoms or agents)."""

    __slots__ = ()

    def __init__(self, index: Iterable, arg: Formula):
        self._init((self._check_index(index), arg), arg._len + 1)

    @staticmethod
    def _check_index(index) -> frozenset:
        raise NotImplementedError

    @property
    def arg(self) -> Formula:
        return self._key[1]

    @property
    def children(self):
        return (self._key[1],)


class Diamond(_Modal):
    """PECP ``<X> f``: f holds somewhere agreeing with here on X."""

    __slots__ = ()

    @staticmethod
    def _check_index(index):
        sig = frozenset(index)
        for name in sig:
            if not isinstance(name, str) or not ATOM_RE.match(name):
                raise ValueError(f"invalid atom {name!r} in signature")
        return sig

    @property
    def signature(self) -> frozenset[str]:
        return self._key[0]


def _check_agents(index) -> frozenset:
    agents = frozenset(index)
    for a in agents:
        if not isinstance(a, int) or isinstance(a, bool) or a < 1:
            raise ValueError(f"agent ids are integers >= 1, got {a!r}")
    return agents


class StitBox(_Modal):
    """``[J:stit] f``."""

    __slots__ = ()
    _check_index = staticmethod(_check_agents)

    @property
    def coalition(self) -> frozenset[int]:
        return self._key[0]


class CoopDiamond(_Modal):
    """CL-PC ``dia J f``."""

    __slots__ = ()
    _check_index = staticmethod(_check_agents)

    @property
    def coalition(self) -> frozenset[int]:
        return self._key[0]


class BoxAll(Formula):
    """S5 ``[] f`` read as the universal modality."""

    __slots__ = ()

    def __init__(self, arg: Formula):
        self._init((arg,), arg._len + 1)

    @property
    def arg(self) -> Formula:
        return self._key[0]

    @property
    def children(self):
        return self._key


TOP = Top()
BOT = Not(TOP)


# -- sugar -------------------------------------------------------------------


def Or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def Imp(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def Box(signature: Iterable[str], f: Formula) -> Formula:
    return Not(Diamond(signature, Not(f)))


def StitDiamond(coalition: Iterable[int], f: Formula) -> Formula:
    return Not(StitBox(coalition, Not(f)))


def CoopBox(coalition: Iterable[int], f: Formula) -> Formula:
    return Not(CoopDiamond(coalition, Not(f)))


def DiamondAll(f: Formula) -> Formula:
    return Not(BoxAll(Not(f)))


def conj(items: Iterable[Formula]) -> Formula:
    """Balanced conjunction; the empty conjunction is ``TOP``."""
    items = list(items)
    if not items:
        return TOP

    def build(lo, hi):
        if hi - lo == 1:
            return items[lo]
        mid = (lo + hi) // 2
        return And(build(lo, mid), build(mid, hi))

    return build(0, len(items))


def disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return BOT
    if len(items) == 1:
        return items[0]
    return Not(conj([Not(f) for f in items]))


def cube(true_atoms: Iterable[str], false_atoms: Iterable[str]) -> Formula:
    """Conjunction of literals in sorted atom order, left nested."""
    lits = [(a, True) for a in true_atoms] + [(a, False) for a in false_atoms]
    lits.sort()
    out = None
    for a, pos in lits:
        lit = Atom(a) if pos else Not(Atom(a))
        out = lit if out is None else And(out, lit)
    return TOP if out is None else out


# -- pattern matching on desugared shapes -------------------------------------


def match_box(f: Formula):
    """``Not(Diamond(X, Not g))`` -> ``(X, g)``, otherwise None."""
    if type(f) is Not and type(f.arg) is Diamond and type(f.arg.arg) is Not:
        return f.arg.signature, f.arg.arg.arg
    return None


def match_iff(f: Formula):
    """Inverse of :func:`Iff`: ``(a, b)`` or None."""
    if type(f) is not And:
        return None
    left, right = f.left, f.right
    if type(left) is not Not or type(right) is not Not:
        return None
    l, r = left.arg, right.arg
    if type(l) is not And or type(r) is not And:
        return None
    if type(l.right) is not Not or type(r.right) is not Not:
        return None
    a, b = l.left, l.right.arg
    if r.left == b and r.right.arg == a:
        return a, b
    return None


def strip_double_negations(f: Formula) -> Formula:
    cache: dict[Formula, Formula] = {}

    def go(g):
        hit = cache.get(g)
        if hit is not None:
            return hit
        t = type(g)
        if t is Not and type(g.arg) is Not:
            out = go(g.arg.arg)
        elif t is Not:
            out = Not(go(g.arg))
        elif t is And:
            out = And(go(g.left), go(g.right))
        elif t in (Diamond, StitBox, CoopDiamond):
            out = t(g._key[0], go(g.arg))
        elif t is BoxAll:
            out = BoxAll(go(g.arg))
        else:
            out = g
        cache[g] = out
        return out

    return go(f)


# -- structural queries -------------------------------------------------------


def iter_dag(f: Formula) -> Iterator[Formula]:
    """Distinct subformulas, children before parents."""
    seen: set[Formula] = set()
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        for child in reversed(node.children):
            if child not in seen:
                stack.append((child, False))


def subformulas(f: Formula) -> list[Formula]:
    """SF(f) with duplicates merged, ordered by size then by printed form."""
    from paribus.parsing import to_text

    return sorted(iter_dag(f), key=lambda g: (g._len, to_text(g)))


def length(f: Formula) -> int:
    """Number of nodes of the desugared tree."""
    return f._len


def atoms_of(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    for g in iter_dag(f):
        if type(g) is Atom:
            out.add(g.name)
        elif type(g) is Diamond:
            out.update(g.signature)
    return frozenset(out)


def signatures_in(f: Formula) -> frozenset[frozenset[str]]:
    return frozenset(g.signature for g in iter_dag(f) if type(g) is Diamond)


def coalitions_in(f: Formula) -> frozenset[frozenset[int]]:
    return frozenset(
        g.coalition for g in iter_dag(f) if type(g) in (StitBox, CoopDiamond)
    )


def agents_of(f: Formula) -> frozenset[int]:
    out: set[int] = set()
    for c in coalitions_in(f):
        out.update(c)
    return frozenset(out)


def is_chain(sets: Iterable[frozenset]) -> bool:
    ordered = sorted(set(sets), key=len)
    return all(a <= b for a, b in zip(ordered, ordered[1:]))


def is_nested(f: Formula) -> bool:
    """Signatures occurring in f are linearly ordered by inclusion."""
    return is_chain(signatures_in(f))


def is_individual_stit(f: Formula) -> bool:
    """Every STIT coalition is a singleton; the empty coalition is excluded."""
    if language_of(f) not in ("stit", None):
        return False
    return all(len(c) == 1 for c in coalitions_in(f))


def modal_depth(f: Formula) -> int:
    depth: dict[Formula, int] = {}
    for g in iter_dag(f):
        d = max((depth[c] for c in g.children), default=0)
        if isinstance(g, (_Modal, BoxAll)):
            d += 1
        depth[g] = d
    return depth[f]


_LANG_OF = {Diamond: "pecp", StitBox: "stit", CoopDiamond: "clpc", BoxAll: "s5"}


def language_of(f: Formula) -> str | None:
    """The language whose modality occurs in f; None when modality free.

    Raises ValueError for formulas mixing modalities of two languages.
    """
    langs = {_LANG_OF[type(g)] for g in iter_dag(f) if type(g) in _LANG_OF}
    if len(langs) > 1:
        raise ValueError(f"formula mixes modalities of {sorted(langs)}")
    return langs.pop() if langs else None


def check_reserved(f: Formula, prefix: str) -> None:
    """Raise if a user formula already uses atoms with a reserved prefix."""
    clash = sorted(a for a in atoms_of(f) if a.startswith(prefix))
    if clash:
        raise ValueError(
            f"atoms {clash} use the reserved prefix {prefix!r}; rename them"
        )
