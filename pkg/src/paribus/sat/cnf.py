"""CNF instances, a Tseitin builder with constant folding, and DIMACS text."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

# Constant pseudo-literals used by the builder; they never reach a clause.
TRUE = "T"
FALSE = "F"


@dataclass
class CnfInstance:
    num_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    meaning: dict[int, Hashable] = field(default_factory=dict)
    # optional branching hint: (variable, preferred value) pairs tried first
    branch_first: list[tuple[int, bool]] = field(default_factory=list)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfInstance:
    inst = CnfInstance()
    pending: list[int] = []
    declared = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header {line!r}")
            declared = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                inst.clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
                inst.num_vars = max(inst.num_vars, abs(lit))
    if pending:
        inst.clauses.append(pending)
    if declared is not None:
        inst.num_vars = max(inst.num_vars, declared)
    return inst


class CnfBuilder:
    """Allocates variables and emits clauses; gate helpers fold constants."""

    def __init__(self):
        self.inst = CnfInstance()
        self._gates: dict[tuple, int] = {}

    def var(self, meaning: Hashable = None) -> int:
        self.inst.num_vars += 1
        v = self.inst.num_vars
        if meaning is not None:
            self.inst.meaning[v] = meaning
        return v

    def clause(self, lits: Iterable) -> None:
        out = []
        for lit in lits:
            if lit == TRUE:
                return
            if lit == FALSE:
                continue
            out.append(lit)
        out = list(dict.fromkeys(out))
        if any(-lit in out for lit in out):
            return
        self.inst.clauses.append(out)

    @staticmethod
    def neg(a):
        if a == TRUE:
            return FALSE
        if a == FALSE:
            return TRUE
        return -a

    def and_(self, items: Iterable):
        lits = []
        for a in items:
            if a == FALSE:
                return FALSE
            if a != TRUE:
                lits.append(a)
        lits = sorted(set(lits), key=lambda x: (abs(x), x))
        if not lits:
            return TRUE
        if any(-a in lits for a in lits):
            return FALSE
        if len(lits) == 1:
            return lits[0]
        key = ("and", *lits)
        hit = self._gates.get(key)
        if hit is not None:
            return hit
        g = self.var()
        for a in lits:
            self.clause([-g, a])
        self.clause([g] + [-a for a in lits])
        self._gates[key] = g
        return g

    def or_(self, items: Iterable):
        return self.neg(self.and_(self.neg(a) for a in items))

    def implies(self, a, b) -> None:
        self.clause([self.neg(a), b])

    def equiv(self, a, b) -> None:
        self.implies(a, b)
        self.implies(b, a)
