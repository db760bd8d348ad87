"""Conflict-driven clause learning SAT solver, pure-Python edition.

Same algorithm as the compiled extension (two watched literals, VSIDS
decisions with a lazy heap, phase saving, Luby restarts, first-UIP
learning with local minimization, LBD-based clause database reduction).
This module is the import-time fallback when the extension is
unavailable and the reference the extension is tested against.
"""

from __future__ import annotations

import time
from array import array
from heapq import heapify, heappop, heappush
from typing import Iterable, Optional

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

_UNASSIGNED = -1


def luby(x: int) -> int:
    """Reluctant doubling sequence 1 1 2 1 1 2 4 ..., 0-indexed."""
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x %= size
    return 1 << seq


class Solver:
    """One-shot solver: add clauses (DIMACS literals), then solve()."""

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.clauses: list[Optional[list[int]]] = []
        self.learnt_refs: list[int] = []
        self.lbd: dict[int, int] = {}
        self.watches: list[list[int]] = [[] for _ in range(2 * n_vars)]
        self.assigns = array("b", [_UNASSIGNED] * n_vars)
        self.level = array("i", [0] * n_vars)
        self.reason = array("i", [-1] * n_vars)
        self.saved_phase = array("b", [0] * n_vars)
        self.activity = [0.0] * n_vars
        self.var_inc = 1.0
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(n_vars)]
        heapify(self.heap)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.ok = True
        self._root_units: list[int] = []

    # -- literal helpers: lit = 2*var + (1 if negated) ------------------

    @staticmethod
    def _to_internal(dimacs_lit: int) -> int:
        v = abs(dimacs_lit) - 1
        return 2 * v + (1 if dimacs_lit < 0 else 0)

    def _value(self, lit: int) -> int:
        a = self.assigns[lit >> 1]
        if a == _UNASSIGNED:
            return _UNASSIGNED
        return a ^ (lit & 1)

    # -- clause intake ---------------------------------------------------

    def add_clause(self, dimacs_lits: Iterable[int]) -> None:
        lits = sorted({self._to_internal(l) for l in dimacs_lits})
        seen = set(lits)
        if any(l ^ 1 in seen for l in lits):
            return  # tautology
        if not lits:
            self.ok = False
            return
        if len(lits) == 1:
            self._root_units.append(lits[0])
            return
        self._attach(lits, learnt=False)

    def _attach(self, lits: list[int], learnt: bool) -> int:
        cref = len(self.clauses)
        self.clauses.append(lits)
        self.watches[lits[0] ^ 1].append(cref)
        self.watches[lits[1] ^ 1].append(cref)
        if learnt:
            self.learnt_refs.append(cref)
        return cref

    # -- assignment -------------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> bool:
        val = self._value(lit)
        if val != _UNASSIGNED:
            return val == 1
        v = lit >> 1
        self.assigns[v] = 1 - (lit & 1)
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause ref or -1."""
        watches = self.watches
        clauses = self.clauses
        assigns = self.assigns
        trail = self.trail
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            falsified = lit ^ 1
            wl = watches[lit]
            i = 0
            j = 0
            n = len(wl)
            while i < n:
                cref = wl[i]
                i += 1
                c = clauses[cref]
                if c is None:
                    continue
                if c[0] == falsified:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                a = assigns[first >> 1]
                if a != _UNASSIGNED and (a ^ (first & 1)) == 1:
                    wl[j] = cref
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    lk = c[k]
                    ak = assigns[lk >> 1]
                    if ak == _UNASSIGNED or (ak ^ (lk & 1)) == 1:
                        c[1], c[k] = lk, c[1]
                        watches[lk ^ 1].append(cref)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = cref
                j += 1
                if a != _UNASSIGNED:
                    # first is false as well: conflict.
                    while i < n:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    del wl[j:]
                    return cref
                v = first >> 1
                assigns[v] = 1 - (first & 1)
                self.level[v] = len(self.trail_lim)
                self.reason[v] = cref
                trail.append(first)
            del wl[j:]
        return -1

    # -- learning -----------------------------------------------------------

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            scale = 1e-100
            self.activity = [a * scale for a in self.activity]
            self.var_inc *= scale
            self.heap = [
                (-self.activity[u], u)
                for u in range(self.n_vars)
                if self.assigns[u] == _UNASSIGNED
            ]
            heapify(self.heap)
        else:
            heappush(self.heap, (-act, v))

    def _analyze(self, conflict: int) -> tuple[list[int], int, int]:
        learnt = [0]
        seen = bytearray(self.n_vars)
        counter = 0
        p = -1
        cref = conflict
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        while True:
            for q in self.clauses[cref]:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and self.level[v] > 0:
                    seen[v] = 1
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            v = p >> 1
            idx -= 1
            counter -= 1
            seen[v] = 0
            if counter == 0:
                break
            cref = self.reason[v]
        learnt[0] = p ^ 1

        # Local minimization: drop literals whose whole reason is seen.
        for q in learnt[1:]:
            seen[q >> 1] = 1
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r == -1:
                kept.append(q)
                continue
            redundant = all(
                other == (q ^ 1) or seen[other >> 1] or self.level[other >> 1] == 0
                for other in self.clauses[r]
            )
            if not redundant:
                kept.append(q)
        learnt = kept

        if len(learnt) == 1:
            return learnt, 0, 1
        max_i = 1
        for i in range(2, len(learnt)):
            if self.level[learnt[i] >> 1] > self.level[learnt[max_i] >> 1]:
                max_i = i
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        back = self.level[learnt[1] >> 1]
        glue = len({self.level[q >> 1] for q in learnt})
        return learnt, back, glue

    def _backtrack(self, target: int) -> None:
        if len(self.trail_lim) <= target:
            return
        bound = self.trail_lim[target]
        heap = self.heap
        for lit in reversed(self.trail[bound:]):
            v = lit >> 1
            self.saved_phase[v] = 1 - (lit & 1)
            self.assigns[v] = _UNASSIGNED
            self.reason[v] = -1
            heappush(heap, (-self.activity[v], v))
        del self.trail[bound:]
        del self.trail_lim[target:]
        self.qhead = bound

    def _reduce_db(self) -> None:
        locked = {self.reason[lit >> 1] for lit in self.trail}
        scored = []
        keep: list[int] = []
        for cref in self.learnt_refs:
            c = self.clauses[cref]
            if c is None:
                continue
            g = self.lbd.get(cref, 9)
            if g <= 2 or len(c) <= 2 or cref in locked:
                keep.append(cref)
            else:
                scored.append((g, cref))
        scored.sort(reverse=True)
        drop = scored[: len(scored) // 2]
        for _, cref in drop:
            self.clauses[cref] = None
            self.lbd.pop(cref, None)
        self.learnt_refs = keep + [cref for _, cref in scored[len(drop):]]

    # -- main loop ------------------------------------------------------------

    def _pick_branch(self) -> int:
        heap = self.heap
        assigns = self.assigns
        activity = self.activity
        while heap:
            act, v = heap[0]
            if assigns[v] != _UNASSIGNED or -act != activity[v]:
                heappop(heap)
                continue
            return 2 * v + (0 if self.saved_phase[v] else 1)
        return -1

    def solve(self, deadline: Optional[float] = None) -> str:
        if not self.ok:
            return UNSAT
        for lit in self._root_units:
            if not self._enqueue(lit, -1):
                return UNSAT
        conflicts = 0
        restart_idx = 0
        restart_budget = 128 * luby(0)
        max_learnts = max(2000, len(self.clauses) // 3)
        while True:
            confl = self._propagate()
            if confl != -1:
                conflicts += 1
                if not self.trail_lim:
                    return UNSAT
                learnt, back, glue = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    if not self._enqueue(learnt[0], -1):
                        return UNSAT
                else:
                    cref = self._attach(learnt, learnt=True)
                    self.lbd[cref] = glue
                    self._enqueue(learnt[0], cref)
                self.var_inc *= 1.0 / 0.95
                restart_budget -= 1
                if conflicts % 1024 == 0 and deadline is not None:
                    if time.monotonic() > deadline:
                        return UNKNOWN
                if restart_budget <= 0:
                    restart_idx += 1
                    restart_budget = 128 * luby(restart_idx)
                    self._backtrack(0)
                if len(self.learnt_refs) > max_learnts:
                    self._reduce_db()
                    max_learnts += max_learnts // 10
                continue
            lit = self._pick_branch()
            if lit == -1:
                return SAT
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)

    def model(self) -> list[bool]:
        return [self.assigns[v] == 1 for v in range(self.n_vars)]


def solve_flat(n_vars: int, flat, deadline: Optional[float] = None):
    """Solve a zero-terminated flat clause buffer of DIMACS literals."""
    solver = Solver(n_vars)
    clause: list[int] = []
    for lit in flat:
        if lit == 0:
            solver.add_clause(clause)
            clause.clear()
        else:
            clause.append(lit)
    if clause:
        solver.add_clause(clause)
    status = solver.solve(deadline)
    return status, solver.model() if status == SAT else None
