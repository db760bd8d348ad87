# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled CDCL core; mirrors cdcl.py (the pure-Python twin) exactly.

Clauses live in a growable int arena: [size, lbd, lit0, lit1, ...] with
the clause reference pointing at the size word.  Watch lists store
(clause ref, blocker literal) pairs.
"""

import time

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memset

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

DEF UNASSIGNED = -1


cdef struct Vec:
    int* data
    int size
    int cap


cdef inline void vec_init(Vec* v) noexcept:
    v.data = NULL
    v.size = 0
    v.cap = 0


cdef inline void vec_push(Vec* v, int x) noexcept:
    if v.size == v.cap:
        v.cap = 8 if v.cap == 0 else v.cap * 2
        v.data = <int*>realloc(v.data, v.cap * sizeof(int))
    v.data[v.size] = x
    v.size += 1


cdef inline void vec_free(Vec* v) noexcept:
    if v.data != NULL:
        free(v.data)
    v.data = NULL
    v.size = 0
    v.cap = 0


cdef class Solver:
    cdef int n_vars
    cdef int* arena
    cdef long arena_size
    cdef long arena_cap
    cdef Vec* watches          # 2 * n_vars lists of (cref, blocker) pairs
    cdef Vec learnt_refs
    cdef signed char* assigns
    cdef signed char* saved_phase
    cdef signed char* seen
    cdef int* level
    cdef long* reason          # cref or -1
    cdef double* activity
    cdef double var_inc
    cdef int* heap             # indexed max-heap on activity
    cdef int* heap_pos         # -1 when not in heap
    cdef int heap_size
    cdef int* trail
    cdef int trail_size
    cdef int* trail_lim
    cdef int n_levels
    cdef int qhead
    cdef bint ok
    cdef Vec root_units
    cdef int* tmp_learnt
    cdef int tmp_learnt_size
    cdef signed char* tmp_keep

    def __cinit__(self, int n_vars):
        cdef int i
        self.n_vars = n_vars
        self.arena_cap = 1 << 16
        self.arena = <int*>malloc(self.arena_cap * sizeof(int))
        self.arena_size = 0
        self.watches = <Vec*>malloc(2 * n_vars * sizeof(Vec))
        for i in range(2 * n_vars):
            vec_init(&self.watches[i])
        vec_init(&self.learnt_refs)
        vec_init(&self.root_units)
        self.assigns = <signed char*>malloc(n_vars)
        memset(self.assigns, 0xFF, n_vars)  # -1 everywhere
        self.saved_phase = <signed char*>malloc(n_vars)
        memset(self.saved_phase, 0, n_vars)
        self.seen = <signed char*>malloc(n_vars)
        memset(self.seen, 0, n_vars)
        self.level = <int*>malloc(n_vars * sizeof(int))
        self.reason = <long*>malloc(n_vars * sizeof(long))
        for i in range(n_vars):
            self.level[i] = 0
            self.reason[i] = -1
        self.activity = <double*>malloc(n_vars * sizeof(double))
        self.heap = <int*>malloc(n_vars * sizeof(int))
        self.heap_pos = <int*>malloc(n_vars * sizeof(int))
        for i in range(n_vars):
            self.activity[i] = 0.0
            self.heap[i] = i
            self.heap_pos[i] = i
        self.heap_size = n_vars
        self.var_inc = 1.0
        self.trail = <int*>malloc(n_vars * sizeof(int))
        self.trail_size = 0
        self.trail_lim = <int*>malloc((n_vars + 1) * sizeof(int))
        self.n_levels = 0
        self.qhead = 0
        self.ok = True
        self.tmp_learnt = <int*>malloc((n_vars + 1) * sizeof(int))
        self.tmp_learnt_size = 0
        self.tmp_keep = <signed char*>malloc(n_vars + 1)

    def __dealloc__(self):
        cdef int i
        if self.watches != NULL:
            for i in range(2 * self.n_vars):
                vec_free(&self.watches[i])
            free(self.watches)
        vec_free(&self.learnt_refs)
        vec_free(&self.root_units)
        free(self.arena)
        free(self.assigns)
        free(self.saved_phase)
        free(self.seen)
        free(self.level)
        free(self.reason)
        free(self.activity)
        free(self.heap)
        free(self.heap_pos)
        free(self.trail)
        free(self.trail_lim)
        free(self.tmp_learnt)
        free(self.tmp_keep)

    # -- heap on activity ------------------------------------------------

    cdef inline bint _heap_less(self, int a, int b) noexcept:
        return self.activity[a] > self.activity[b]

    cdef void _heap_up(self, int pos) noexcept:
        cdef int v = self.heap[pos]
        cdef int parent
        while pos > 0:
            parent = (pos - 1) >> 1
            if self._heap_less(v, self.heap[parent]):
                self.heap[pos] = self.heap[parent]
                self.heap_pos[self.heap[pos]] = pos
                pos = parent
            else:
                break
        self.heap[pos] = v
        self.heap_pos[v] = pos

    cdef void _heap_down(self, int pos) noexcept:
        cdef int v = self.heap[pos]
        cdef int child
        while True:
            child = 2 * pos + 1
            if child >= self.heap_size:
                break
            if child + 1 < self.heap_size and self._heap_less(
                self.heap[child + 1], self.heap[child]
            ):
                child += 1
            if self._heap_less(self.heap[child], v):
                self.heap[pos] = self.heap[child]
                self.heap_pos[self.heap[pos]] = pos
                pos = child
            else:
                break
        self.heap[pos] = v
        self.heap_pos[v] = pos

    cdef inline void _heap_insert(self, int v) noexcept:
        if self.heap_pos[v] != -1:
            return
        self.heap[self.heap_size] = v
        self.heap_pos[v] = self.heap_size
        self.heap_size += 1
        self._heap_up(self.heap_size - 1)

    cdef int _heap_pop(self) noexcept:
        cdef int v = self.heap[0]
        self.heap_size -= 1
        self.heap_pos[v] = -1
        if self.heap_size > 0:
            self.heap[0] = self.heap[self.heap_size]
            self.heap_pos[self.heap[0]] = 0
            self._heap_down(0)
        return v

    # -- clause arena ------------------------------------------------------

    cdef long _alloc_clause(self, int* lits, int size, int lbd) noexcept:
        cdef long need = self.arena_size + size + 2
        cdef long cref
        cdef int i
        while need > self.arena_cap:
            self.arena_cap *= 2
            self.arena = <int*>realloc(self.arena, self.arena_cap * sizeof(int))
        cref = self.arena_size
        self.arena[cref] = size
        self.arena[cref + 1] = lbd
        for i in range(size):
            self.arena[cref + 2 + i] = lits[i]
        self.arena_size = need
        return cref

    cdef void _attach(self, long cref) noexcept:
        cdef int* lits = self.arena + cref + 2
        vec_push(&self.watches[lits[0] ^ 1], <int>cref)
        vec_push(&self.watches[lits[0] ^ 1], lits[1])
        vec_push(&self.watches[lits[1] ^ 1], <int>cref)
        vec_push(&self.watches[lits[1] ^ 1], lits[0])

    # -- assignment ------------------------------------------------------

    cdef inline int _value(self, int lit) noexcept:
        cdef signed char a = self.assigns[lit >> 1]
        if a == UNASSIGNED:
            return UNASSIGNED
        return a ^ (lit & 1)

    cdef inline bint _enqueue(self, int lit, long reason) noexcept:
        cdef int val = self._value(lit)
        cdef int v
        if val != UNASSIGNED:
            return val == 1
        v = lit >> 1
        self.assigns[v] = 1 - (lit & 1)
        self.level[v] = self.n_levels
        self.reason[v] = reason
        self.trail[self.trail_size] = lit
        self.trail_size += 1
        return True

    cdef long _propagate(self) noexcept:
        cdef int lit, falsified, first, blocker, k, size, lk
        cdef long cref
        cdef Vec* wl
        cdef int i, j, n
        cdef int* arena
        cdef int* lits
        cdef signed char a, ak
        while self.qhead < self.trail_size:
            lit = self.trail[self.qhead]
            self.qhead += 1
            falsified = lit ^ 1
            wl = &self.watches[lit]
            i = 0
            j = 0
            n = wl.size
            arena = self.arena
            while i < n:
                cref = wl.data[i]
                blocker = wl.data[i + 1]
                i += 2
                if self._value(blocker) == 1:
                    wl.data[j] = <int>cref
                    wl.data[j + 1] = blocker
                    j += 2
                    continue
                size = arena[cref]
                if size <= 0:  # deleted
                    continue
                lits = arena + cref + 2
                if lits[0] == falsified:
                    lits[0] = lits[1]
                    lits[1] = falsified
                first = lits[0]
                if self._value(first) == 1:
                    wl.data[j] = <int>cref
                    wl.data[j + 1] = first
                    j += 2
                    continue
                k = 2
                while k < size:
                    lk = lits[k]
                    if self._value(lk) != 0:
                        lits[1] = lk
                        lits[k] = falsified
                        vec_push(&self.watches[lk ^ 1], <int>cref)
                        vec_push(&self.watches[lk ^ 1], first)
                        break
                    k += 1
                if k < size:
                    continue
                wl.data[j] = <int>cref
                wl.data[j + 1] = first
                j += 2
                if self._value(first) == 0:
                    while i < n:
                        wl.data[j] = wl.data[i]
                        wl.data[j + 1] = wl.data[i + 1]
                        i += 2
                        j += 2
                    wl.size = j
                    return cref
                self._enqueue(first, cref)
            wl.size = j
        return -1

    # -- learning -----------------------------------------------------------

    cdef void _bump(self, int v) noexcept:
        cdef int i
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for i in range(self.n_vars):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100
        if self.heap_pos[v] != -1:
            self._heap_up(self.heap_pos[v])

    cdef int _analyze(self, long conflict, int* out_back, int* out_glue):
        cdef int* learnt = self.tmp_learnt
        cdef int learnt_size = 1
        cdef int counter = 0
        cdef int p = -1
        cdef long cref = conflict
        cdef int idx = self.trail_size - 1
        cdef int cur_level = self.n_levels
        cdef int* arena = self.arena
        cdef int* lits
        cdef int size, q, v, i, kk
        while True:
            size = arena[cref]
            lits = arena + cref + 2
            for i in range(size):
                q = lits[i]
                if q == p:
                    continue
                v = q >> 1
                if not self.seen[v] and self.level[v] > 0:
                    self.seen[v] = 1
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt[learnt_size] = q
                        learnt_size += 1
            while not self.seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            v = p >> 1
            idx -= 1
            counter -= 1
            self.seen[v] = 0
            if counter == 0:
                break
            cref = self.reason[v]
        learnt[0] = p ^ 1

        # Local minimization: drop literals whose whole reason is seen.
        # Decide all drops first, then clear the seen bits of the original
        # literals, then compact; compacting earlier would leak seen bits.
        cdef int kept_size = 1
        cdef bint redundant
        cdef long r
        cdef int other
        for i in range(1, learnt_size):
            self.seen[learnt[i] >> 1] = 1
        for i in range(1, learnt_size):
            q = learnt[i]
            r = self.reason[q >> 1]
            redundant = False
            if r != -1:
                redundant = True
                size = arena[r]
                lits = arena + r + 2
                for kk in range(size):
                    other = lits[kk]
                    if other == (q ^ 1):
                        continue
                    if not self.seen[other >> 1] and self.level[other >> 1] != 0:
                        redundant = False
                        break
            self.tmp_keep[i] = 0 if redundant else 1
        for i in range(1, learnt_size):
            self.seen[learnt[i] >> 1] = 0
        self.seen[learnt[0] >> 1] = 0
        for i in range(1, learnt_size):
            if self.tmp_keep[i]:
                learnt[kept_size] = learnt[i]
                kept_size += 1
        learnt_size = kept_size

        cdef int max_i, tmp, glue, back
        if learnt_size == 1:
            out_back[0] = 0
            out_glue[0] = 1
            self.tmp_learnt_size = learnt_size
            return learnt_size
        max_i = 1
        for i in range(2, learnt_size):
            if self.level[learnt[i] >> 1] > self.level[learnt[max_i] >> 1]:
                max_i = i
        tmp = learnt[1]
        learnt[1] = learnt[max_i]
        learnt[max_i] = tmp
        back = self.level[learnt[1] >> 1]
        # Glue = number of distinct decision levels; pairwise scan for the
        # common small clauses, python set for the rest.
        if learnt_size <= 16:
            glue = 0
            for i in range(learnt_size):
                counter = 0
                for kk in range(i):
                    if self.level[learnt[kk] >> 1] == self.level[learnt[i] >> 1]:
                        counter = 1
                        break
                if counter == 0:
                    glue += 1
        else:
            glue = len({self.level[learnt[i] >> 1] for i in range(learnt_size)})
        out_back[0] = back
        out_glue[0] = glue
        self.tmp_learnt_size = learnt_size
        return learnt_size

    cdef void _backtrack(self, int target) noexcept:
        cdef int bound, i, lit, v
        if self.n_levels <= target:
            return
        bound = self.trail_lim[target]
        for i in range(self.trail_size - 1, bound - 1, -1):
            lit = self.trail[i]
            v = lit >> 1
            self.saved_phase[v] = 1 - (lit & 1)
            self.assigns[v] = UNASSIGNED
            self.reason[v] = -1
            self._heap_insert(v)
        self.trail_size = bound
        self.n_levels = target
        self.qhead = bound

    cdef void _reduce_db(self):
        cdef Vec survivors
        cdef list scored = []
        cdef int i, lbd, size
        cdef long cref
        cdef set locked = set()
        for i in range(self.trail_size):
            if self.reason[self.trail[i] >> 1] != -1:
                locked.add(self.reason[self.trail[i] >> 1])
        vec_init(&survivors)
        for i in range(self.learnt_refs.size):
            cref = self.learnt_refs.data[i]
            size = self.arena[cref]
            if size <= 0:
                continue
            lbd = self.arena[cref + 1]
            if lbd <= 2 or size <= 2 or cref in locked:
                vec_push(&survivors, <int>cref)
            else:
                scored.append((lbd, cref))
        scored.sort(reverse=True)
        cdef int n_drop = len(scored) // 2
        for i in range(n_drop):
            cref = scored[i][1]
            self.arena[cref] = -self.arena[cref]  # mark deleted
        for i in range(n_drop, len(scored)):
            vec_push(&survivors, <int>(scored[i][1]))
        vec_free(&self.learnt_refs)
        self.learnt_refs = survivors

    # -- public API --------------------------------------------------------

    def add_clause(self, lits):
        cdef list internal = sorted({2 * (abs(l) - 1) + (1 if l < 0 else 0) for l in lits})
        cdef set present = set(internal)
        cdef int l
        for l in internal:
            if (l ^ 1) in present:
                return  # tautology
        if not internal:
            self.ok = False
            return
        if len(internal) == 1:
            vec_push(&self.root_units, internal[0])
            return
        cdef int* buf = <int*>malloc(len(internal) * sizeof(int))
        cdef int i
        for i in range(len(internal)):
            buf[i] = internal[i]
        cdef long cref = self._alloc_clause(buf, len(internal), 0)
        free(buf)
        self._attach(cref)

    def solve(self, deadline=None):
        cdef long confl, cref
        cdef int conflicts = 0
        cdef int restart_idx = 0
        cdef int restart_budget = 128
        cdef long max_learnts
        cdef int lit, back, glue, learnt_size, v
        cdef double dl = -1.0
        if deadline is not None:
            dl = deadline
        if not self.ok:
            return UNSAT
        cdef int i
        for i in range(self.root_units.size):
            if not self._enqueue(self.root_units.data[i], -1):
                return UNSAT
        max_learnts = 2000
        if self.arena_size // 6 > max_learnts:
            max_learnts = self.arena_size // 6
        while True:
            confl = self._propagate()
            if confl != -1:
                conflicts += 1
                if self.n_levels == 0:
                    return UNSAT
                learnt_size = self._analyze(confl, &back, &glue)
                self._backtrack(back)
                if learnt_size == 1:
                    if not self._enqueue(self.tmp_learnt[0], -1):
                        return UNSAT
                else:
                    cref = self._alloc_clause(self.tmp_learnt, learnt_size, glue)
                    self._attach(cref)
                    vec_push(&self.learnt_refs, <int>cref)
                    self._enqueue(self.tmp_learnt[0], cref)
                self.var_inc *= 1.0 / 0.95
                restart_budget -= 1
                if conflicts % 1024 == 0 and dl > 0:
                    if time.monotonic() > dl:
                        return UNKNOWN
                if restart_budget <= 0:
                    restart_idx += 1
                    restart_budget = 128 * _luby(restart_idx)
                    self._backtrack(0)
                if self.learnt_refs.size > max_learnts:
                    self._reduce_db()
                    max_learnts += max_learnts // 10
                continue
            # Decision.
            lit = -1
            while self.heap_size > 0:
                v = self.heap[0]
                if self.assigns[v] == UNASSIGNED:
                    lit = 2 * v + (0 if self.saved_phase[v] else 1)
                    break
                self._heap_pop()
            if lit == -1:
                return SAT
            self._heap_pop()
            self.trail_lim[self.n_levels] = self.trail_size
            self.n_levels += 1
            self._enqueue(lit, -1)

    def model(self):
        return [self.assigns[v] == 1 for v in range(self.n_vars)]


def _luby(x):
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x %= size
    return 1 << seq


def solve_flat(int n_vars, flat, deadline=None):
    """Solve a zero-terminated flat clause buffer of DIMACS literals."""
    cdef Solver solver = Solver(n_vars)
    cdef int[::1] view
    try:
        view = flat
    except (TypeError, ValueError):
        view = None
    cdef list clause = []
    cdef long i, n
    cdef int lit
    if view is not None:
        n = view.shape[0]
        for i in range(n):
            lit = view[i]
            if lit == 0:
                solver.add_clause(clause)
                clause = []
            else:
                clause.append(lit)
    else:
        for lit_obj in flat:
            lit = lit_obj
            if lit == 0:
                solver.add_clause(clause)
                clause = []
            else:
                clause.append(lit)
    if clause:
        solver.add_clause(clause)
    status = solver.solve(deadline)
    return status, solver.model() if status == SAT else None
