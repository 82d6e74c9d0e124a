"""Propositional SAT engines.

``DpllEngine``
    DPLL with two-watched-literal unit propagation, chronological
    backtracking and a static most-occurrences branching order.
``CdclEngine`` (default)
    The same propagation plus first-UIP clause learning, non-chronological
    backjumping, activity-based branching, phase saving and Luby restarts.
``ExternalEngine``
    Any DIMACS solver run as a subprocess.
"""

from __future__ import annotations

import heapq
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field

from paribus.sat.cnf import CnfInstance


@dataclass
class EngineResult:
    satisfiable: bool
    assignment: dict[int, bool] = field(default_factory=dict)
    decisions: int = 0
    propagations: int = 0


class DpllEngine:
    name = "dpll"

    def solve(self, inst: CnfInstance) -> EngineResult:
        return _dpll(inst.num_vars, inst.clauses, inst.branch_first)


def _dpll(n: int, raw_clauses, branch_first=()) -> EngineResult:
    val = [0] * (n + 1)
    watches: dict[int, list[int]] = {}
    clauses: list[list[int]] = []
    units: list[int] = []
    occurrences = [0] * (2 * n + 2)
    for raw in raw_clauses:
        c = list(dict.fromkeys(raw))
        if not c:
            return EngineResult(False)
        if any(-lit in c for lit in c):
            continue
        for lit in c:
            occurrences[lit] += 1
        if len(c) == 1:
            units.append(c[0])
            continue
        idx = len(clauses)
        clauses.append(c)
        watches.setdefault(c[0], []).append(idx)
        watches.setdefault(c[1], []).append(idx)

    trail: list[int] = []
    stats = EngineResult(False)

    def assign(lit: int) -> bool:
        v = lit if lit > 0 else -lit
        cur = val[v]
        want = 1 if lit > 0 else -1
        if cur == 0:
            val[v] = want
            trail.append(lit)
            return True
        return cur == want

    def propagate(head: int) -> tuple[bool, int]:
        """Propagate trail[head:]; returns (ok, new head)."""
        props = 0
        while head < len(trail):
            lit = trail[head]
            head += 1
            false_lit = -lit
            wl = watches.get(false_lit)
            if not wl:
                continue
            i = 0
            j = 0
            conflict = False
            while i < len(wl):
                ci = wl[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = val[first] if first > 0 else -val[-first]
                if fv == 1:
                    wl[j] = ci
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    other = c[k]
                    ov = val[other] if other > 0 else -val[-other]
                    if ov != -1:
                        c[1], c[k] = other, false_lit
                        watches.setdefault(other, []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = ci
                j += 1
                if fv == 0:
                    props += 1
                    v = first if first > 0 else -first
                    val[v] = 1 if first > 0 else -1
                    trail.append(first)
                else:
                    conflict = True
                    while i < len(wl):
                        wl[j] = wl[i]
                        j += 1
                        i += 1
            del wl[j:]
            if conflict:
                stats.propagations += props
                return False, head
        stats.propagations += props
        return True, head

    for u in units:
        if not assign(u):
            return stats
    ok, head = propagate(0)
    if not ok:
        return stats

    hinted = dict(branch_first)
    rest = sorted(
        (v for v in range(1, n + 1) if v not in hinted),
        key=lambda v: (-(occurrences[v] + occurrences[-v]), v),
    )
    order = list(hinted) + rest
    phase = {v: occurrences[v] >= occurrences[-v] for v in rest}
    phase.update(hinted)
    # decision stack entries: [trail length before, literal, flipped?, order pointer]
    stack: list[list] = []
    ptr = 0
    while True:
        while ptr < len(order) and val[order[ptr]] != 0:
            ptr += 1
        if ptr == len(order):
            stats.satisfiable = True
            stats.assignment = {v: val[v] > 0 for v in range(1, n + 1)}
            return stats
        v = order[ptr]
        lit = v if phase[v] else -v
        stats.decisions += 1
        stack.append([len(trail), lit, False, ptr])
        assign(lit)
        ok, head = propagate(head)
        while not ok:
            while stack and stack[-1][2]:
                stack.pop()
            if not stack:
                return stats
            entry = stack[-1]
            base = entry[0]
            for undone in trail[base:]:
                val[undone if undone > 0 else -undone] = 0
            del trail[base:]
            head = base
            entry[1] = -entry[1]
            entry[2] = True
            ptr = entry[3]
            assign(entry[1])
            ok, head = propagate(head)


def _luby(i: int) -> int:
    """i-th term (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class CdclEngine:
    name = "cdcl"

    def __init__(self, restart_base: int = 100):
        self.restart_base = restart_base

    def solve(self, inst: CnfInstance) -> EngineResult:
        return _cdcl(inst.num_vars, inst.clauses, inst.branch_first, self.restart_base)


def _cdcl(n: int, raw_clauses, branch_first=(), restart_base: int = 100) -> EngineResult:
    stats = EngineResult(False)
    val = [0] * (n + 1)
    level = [0] * (n + 1)
    reason = [-1] * (n + 1)
    activity = [0.0] * (n + 1)
    saved = [False] * (n + 1)
    clauses: list[list[int]] = []
    watches: dict[int, list[int]] = {}
    units: list[int] = []
    for raw in raw_clauses:
        c = list(dict.fromkeys(raw))
        if not c:
            return stats
        if any(-lit in c for lit in c):
            continue
        for lit in c:
            activity[abs(lit)] += 1e-3
        if len(c) == 1:
            units.append(c[0])
            continue
        idx = len(clauses)
        clauses.append(c)
        watches.setdefault(c[0], []).append(idx)
        watches.setdefault(c[1], []).append(idx)
    for v, phase in branch_first:
        activity[v] += 1.0
        saved[v] = bool(phase)

    trail: list[int] = []
    trail_lim: list[int] = []
    heap = [(-activity[v], v) for v in range(1, n + 1)]
    heapq.heapify(heap)
    inc = 1.0

    def enqueue(lit: int, why: int) -> bool:
        v = lit if lit > 0 else -lit
        cur = val[v]
        if cur != 0:
            return (cur > 0) == (lit > 0)
        val[v] = 1 if lit > 0 else -1
        level[v] = len(trail_lim)
        reason[v] = why
        trail.append(lit)
        return True

    qhead = 0

    def propagate() -> int:
        nonlocal qhead
        while qhead < len(trail):
            lit = trail[qhead]
            qhead += 1
            false_lit = -lit
            wl = watches.get(false_lit)
            if not wl:
                continue
            i = j = 0
            conflict = -1
            while i < len(wl):
                ci = wl[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = val[first] if first > 0 else -val[-first]
                if fv == 1:
                    wl[j] = ci
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    other = c[k]
                    ov = val[other] if other > 0 else -val[-other]
                    if ov != -1:
                        c[1], c[k] = other, false_lit
                        watches.setdefault(other, []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = ci
                j += 1
                if fv == 0:
                    v = first if first > 0 else -first
                    val[v] = 1 if first > 0 else -1
                    level[v] = len(trail_lim)
                    reason[v] = ci
                    trail.append(first)
                else:
                    conflict = ci
                    while i < len(wl):
                        wl[j] = wl[i]
                        j += 1
                        i += 1
            del wl[j:]
            if conflict >= 0:
                return conflict
        return -1

    def backtrack(to_level: int) -> None:
        nonlocal qhead
        if len(trail_lim) <= to_level:
            return
        base = trail_lim[to_level]
        for lit in trail[base:]:
            v = lit if lit > 0 else -lit
            saved[v] = lit > 0
            val[v] = 0
            reason[v] = -1
            heapq.heappush(heap, (-activity[v], v))
        del trail[base:]
        del trail_lim[to_level:]
        qhead = base

    def bump(v: int) -> None:
        nonlocal inc
        activity[v] += inc
        if activity[v] > 1e100:
            for u in range(1, n + 1):
                activity[u] *= 1e-100
            inc *= 1e-100

    def analyze(confl: int) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        counter = 0
        lit = 0
        idx = len(trail) - 1
        cur = len(trail_lim)
        clause = clauses[confl]
        while True:
            for q in clause:
                if q == lit:
                    continue
                v = q if q > 0 else -q
                if v in seen or level[v] == 0:
                    continue
                seen.add(v)
                bump(v)
                if level[v] == cur:
                    counter += 1
                else:
                    learnt.append(q)
            while True:
                lit = trail[idx]
                idx -= 1
                if abs(lit) in seen:
                    break
            counter -= 1
            if counter == 0:
                break
            clause = clauses[reason[abs(lit)]]
        learnt[0] = -lit
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[abs(learnt[1])]

    for u in units:
        if not enqueue(u, -1):
            return stats
    if propagate() >= 0:
        return stats

    restarts = 1
    budget = restart_base * _luby(restarts)
    conflicts_here = 0
    while True:
        confl = propagate()
        if confl >= 0:
            stats.propagations += 1
            if not trail_lim:
                return stats
            learnt, back = analyze(confl)
            backtrack(back)
            if len(learnt) == 1:
                enqueue(learnt[0], -1)
            else:
                ci = len(clauses)
                clauses.append(learnt)
                watches.setdefault(learnt[0], []).append(ci)
                watches.setdefault(learnt[1], []).append(ci)
                enqueue(learnt[0], ci)
            inc /= 0.95
            conflicts_here += 1
            continue
        if conflicts_here >= budget:
            backtrack(0)
            restarts += 1
            budget = restart_base * _luby(restarts)
            conflicts_here = 0
            continue
        v = 0
        while heap:
            _, cand = heapq.heappop(heap)
            if val[cand] == 0:
                v = cand
                break
        if v == 0:
            stats.satisfiable = True
            stats.assignment = {u: val[u] > 0 for u in range(1, n + 1)}
            return stats
        stats.decisions += 1
        trail_lim.append(len(trail))
        enqueue(v if saved[v] else -v, -1)


class ExternalEngine:
    """Runs ``command FILE`` on a DIMACS file and reads SAT/UNSAT plus an
    assignment line (bare or SAT-competition ``s``/``v`` style)."""

    name = "external"

    def __init__(self, command: str, timeout: float | None = None):
        self.argv = shlex.split(command)
        self.timeout = timeout

    def solve(self, inst: CnfInstance) -> EngineResult:
        with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
            fh.write(inst.to_dimacs())
            path = fh.name
        proc = subprocess.run(
            self.argv + [path], capture_output=True, text=True, timeout=self.timeout
        )
        return parse_solver_output(proc.stdout, inst.num_vars)


def parse_solver_output(text: str, num_vars: int) -> EngineResult:
    verdict = None
    lits: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        body = line[2:].strip() if line[:2] in ("s ", "v ") else line
        upper = body.upper()
        if upper in ("SAT", "SATISFIABLE"):
            verdict = True
            continue
        if upper in ("UNSAT", "UNSATISFIABLE"):
            verdict = False
            continue
        try:
            lits.extend(int(tok) for tok in body.split())
        except ValueError:
            continue
    if verdict is None:
        raise RuntimeError("external solver printed no SAT/UNSAT verdict")
    if not verdict:
        return EngineResult(False)
    assignment = {v: False for v in range(1, num_vars + 1)}
    for lit in lits:
        if lit:
            assignment[abs(lit)] = lit > 0
    return EngineResult(True, assignment)


ENGINES = {"cdcl": CdclEngine, "dpll": DpllEngine}
_ENGINE = CdclEngine()


def make_engine(name: str):
    """'cdcl', 'dpll' or 'external:COMMAND'."""
    if name.startswith("external:"):
        return ExternalEngine(name.split(":", 1)[1])
    try:
        return ENGINES[name]()
    except KeyError:
        raise ValueError(f"unknown SAT engine {name!r}") from None


def default_engine():
    return _ENGINE


def set_default_engine(engine) -> None:
    global _ENGINE
    _ENGINE = engine or CdclEngine()


def solve(inst: CnfInstance, engine=None) -> EngineResult:
    return (engine or _ENGINE).solve(inst)
