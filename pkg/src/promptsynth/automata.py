"""LTL to Büchi translation and the graph algorithms built on top of it.

The translation expands obligation sets into disjuncts of (literals now,
obligations next), yielding a transition-marked generalized automaton
which is then degeneralized per strongly connected component.  States are
numbered deterministically (breadth-first over the expansion order), so
identical formulas always produce structurally identical automata.

Automata are nondeterministic Büchi by default; the same structure is
reinterpreted as a universal co-Büchi automaton (the marked states become
rejecting) for the synthesis pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .formulas import (
    And,
    Atom,
    FalseConst,
    Formula,
    FormulaError,
    Lasso,
    Next,
    NotAtom,
    Or,
    PromptF,
    Release,
    TrueConst,
    Until,
    has_prompt,
    negate,
    sort_key,
)

# A guard is a conjunction of literals: sorted tuple of (name, polarity).
Guard = tuple[tuple[str, bool], ...]
Edge = tuple[Guard, int]


def guard_satisfied(guard: Guard, valuation: frozenset[str]) -> bool:
    return all((name in valuation) == pol for name, pol in guard)


def guard_to_text(guard: Guard) -> str:
    if not guard:
        return "true"
    return " & ".join(name if pol else f"!{name}" for name, pol in guard)


@dataclass(frozen=True)
class BuchiAutomaton:
    """Automaton over proposition valuations with guard-labeled edges.

    ``mode`` is "nba" (nondeterministic Büchi: ``marked`` accepting) or
    "ucw" (universal co-Büchi: ``marked`` rejecting).
    """

    n_states: int
    initial: int
    edges: tuple[tuple[Edge, ...], ...]
    marked: frozenset[int]
    mode: str = "nba"

    def __post_init__(self):
        if not 0 <= self.initial < max(self.n_states, 1):
            raise FormulaError("initial state out of range")
        if any(q >= self.n_states for q in self.marked):
            raise FormulaError("marked state out of range")

    @property
    def accepting(self) -> frozenset[int]:
        if self.mode != "nba":
            raise FormulaError("accepting set is only meaningful in nba mode")
        return self.marked

    @property
    def rejecting(self) -> frozenset[int]:
        if self.mode != "ucw":
            raise FormulaError("rejecting set is only meaningful in ucw mode")
        return self.marked

    def propositions(self) -> frozenset[str]:
        return frozenset(
            name for out in self.edges for guard, _ in out for name, _ in guard
        )

    def as_nba(self) -> "BuchiAutomaton":
        if self.mode == "nba":
            return self
        return BuchiAutomaton(self.n_states, self.initial, self.edges, self.marked, "nba")

    def to_json(self) -> str:
        doc = {
            "mode": self.mode,
            "states": self.n_states,
            "initial": self.initial,
            "rejecting" if self.mode == "ucw" else "accepting": sorted(self.marked),
            "edges": [
                {"from": q, "guard": guard_to_text(g), "to": dst}
                for q in range(self.n_states)
                for g, dst in self.edges[q]
            ],
        }
        return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# Expansion into (literals, next obligations, fired untils)

class _Disjunct:
    __slots__ = ("lits", "nexts", "fired")

    def __init__(self, lits, nexts, fired):
        self.lits = lits      # dict name -> bool
        self.nexts = nexts    # frozenset of formulas
        self.fired = fired    # frozenset of until formulas satisfied now


_EMPTY = frozenset()


def _merge(a: _Disjunct, b: _Disjunct) -> Optional[_Disjunct]:
    lits = dict(a.lits)
    for name, pol in b.lits.items():
        if lits.setdefault(name, pol) != pol:
            return None
    return _Disjunct(lits, a.nexts | b.nexts, a.fired | b.fired)


def _expand(f: Formula, memo: dict) -> list[_Disjunct]:
    got = memo.get(id(f))
    if got is not None:
        return got
    if isinstance(f, TrueConst):
        out = [_Disjunct({}, _EMPTY, _EMPTY)]
    elif isinstance(f, FalseConst):
        out = []
    elif isinstance(f, Atom):
        out = [_Disjunct({f.name: True}, _EMPTY, _EMPTY)]
    elif isinstance(f, NotAtom):
        out = [_Disjunct({f.name: False}, _EMPTY, _EMPTY)]
    elif isinstance(f, Next):
        out = [_Disjunct({}, frozenset((f.arg,)), _EMPTY)]
    elif isinstance(f, And):
        out = []
        for da in _expand(f.left, memo):
            for db in _expand(f.right, memo):
                d = _merge(da, db)
                if d is not None:
                    out.append(d)
    elif isinstance(f, Or):
        out = list(_expand(f.left, memo)) + list(_expand(f.right, memo))
    elif isinstance(f, Until):
        out = [
            _Disjunct(d.lits, d.nexts, d.fired | {f}) for d in _expand(f.right, memo)
        ]
        out += [
            _Disjunct(d.lits, d.nexts | {f}, d.fired) for d in _expand(f.left, memo)
        ]
    elif isinstance(f, Release):
        out = []
        for db in _expand(f.right, memo):
            for da in _expand(f.left, memo):
                d = _merge(db, da)
                if d is not None:
                    out.append(d)
            out.append(_Disjunct(db.lits, db.nexts | {f}, db.fired))
    elif isinstance(f, PromptF):
        raise FormulaError("prompt operator present; translate pure LTL only")
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[id(f)] = out
    return out


def _expand_state(obligations: tuple[Formula, ...], memo: dict) -> list[_Disjunct]:
    disjuncts = [_Disjunct({}, _EMPTY, _EMPTY)]
    for f in obligations:
        nxt = []
        for da in disjuncts:
            for db in _expand(f, memo):
                d = _merge(da, db)
                if d is not None:
                    nxt.append(d)
        disjuncts = nxt
    # Deduplicate on (guard, target); firing marks of duplicates merge.
    combined: dict[tuple, _Disjunct] = {}
    order: list[tuple] = []
    for d in disjuncts:
        guard = tuple(sorted(d.lits.items()))
        key = (guard, tuple(sorted(d.nexts, key=sort_key)))
        if key in combined:
            old = combined[key]
            combined[key] = _Disjunct(old.lits, old.nexts, old.fired | d.fired)
        else:
            combined[key] = d
            order.append(key)
    return [combined[key] for key in order]


def _canon(obligations: Iterable[Formula]) -> tuple[Formula, ...]:
    return tuple(sorted(set(obligations), key=sort_key))


def _tarjan_sccs(n: int, succs: list[list[int]]) -> list[int]:
    """Iterative Tarjan; returns the SCC index per node."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    scc_of = [-1] * n
    counter = 0
    scc_count = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for j in range(pi, len(succs[v])):
                w = succs[v][j]
                if index[w] == -1:
                    work[-1] = (v, j + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    scc_of[w] = scc_count
                    if w == v:
                        break
                scc_count += 1
    return scc_of


def ltl_to_nba(f: Formula) -> BuchiAutomaton:
    """Translate a pure-LTL NNF formula into a nondeterministic Büchi
    automaton accepting exactly its models."""
    if has_prompt(f):
        raise FormulaError("prompt operator present; translate pure LTL only")
    memo: dict = {}

    # Phase 1: obligation-set graph with transition-marked acceptance.
    init = _canon((f,))
    states: dict[tuple[Formula, ...], int] = {init: 0}
    order: list[tuple[Formula, ...]] = [init]
    # edge: (src, guard, dst, ongoing untils frozenset)
    tedges: list[tuple[int, Guard, int, frozenset[Formula]]] = []
    queue = [init]
    while queue:
        src = queue.pop(0)
        src_id = states[src]
        for d in _expand_state(src, memo):
            dst = _canon(d.nexts)
            if dst not in states:
                states[dst] = len(order)
                order.append(dst)
                queue.append(dst)
            guard = tuple(sorted(d.lits.items()))
            ongoing = frozenset(
                u for u in d.nexts if isinstance(u, Until) and u not in d.fired
            )
            tedges.append((src_id, guard, states[dst], ongoing))

    n = len(order)
    succs: list[list[int]] = [[] for _ in range(n)]
    for src, _, dst, _ in tedges:
        succs[src].append(dst)
    scc_of = _tarjan_sccs(n, succs)

    # Untils that are carried around inside each SCC; only those matter
    # for acceptance there.
    locals_by_scc: dict[int, list[Formula]] = {}
    pending: dict[int, set[Formula]] = {}
    for src, _, dst, ongoing in tedges:
        if scc_of[src] == scc_of[dst]:
            pending.setdefault(scc_of[src], set()).update(ongoing)
    for scc, us in pending.items():
        locals_by_scc[scc] = sorted(us, key=sort_key)

    out_edges: list[list[tuple[int, Guard, int, frozenset[Formula]]]] = [
        [] for _ in range(n)
    ]
    for e in tedges:
        out_edges[e[0]].append(e)

    # Phase 2: degeneralize.  A state is (obligation state, level); the
    # level counts locally relevant untils witnessed since the last reset
    # and wraps to the marked level when all of them were seen.
    def local(s: int) -> list[Formula]:
        return locals_by_scc.get(scc_of[s], [])

    start = (0, 0)
    deg_ids: dict[tuple[int, int], int] = {start: 0}
    deg_order: list[tuple[int, int]] = [start]
    deg_edges: list[list[Edge]] = [[]]
    queue2 = [start]
    while queue2:
        s, lvl = queue2.pop(0)
        src_id = deg_ids[(s, lvl)]
        loc = local(s)
        m = len(loc)
        for _, guard, dst, ongoing in out_edges[s]:
            if scc_of[dst] != scc_of[s]:
                target = (dst, 0)
            else:
                j = 0 if lvl == m else lvl
                while j < m and loc[j] not in ongoing:
                    j += 1
                target = (dst, j)
            if target not in deg_ids:
                deg_ids[target] = len(deg_order)
                deg_order.append(target)
                deg_edges.append([])
                queue2.append(target)
            deg_edges[src_id].append((guard, deg_ids[target]))

    marked = frozenset(
        deg_ids[(s, lvl)]
        for (s, lvl) in deg_order
        if lvl == len(local(s))
    )
    aut = BuchiAutomaton(
        len(deg_order),
        0,
        tuple(tuple(es) for es in deg_edges),
        marked,
        "nba",
    )
    return _simplify(aut)


# ---------------------------------------------------------------------------
# Language-preserving simplification

def _reachable(aut: BuchiAutomaton) -> list[int]:
    seen = [False] * aut.n_states
    seen[aut.initial] = True
    queue = [aut.initial]
    while queue:
        q = queue.pop(0)
        for _, dst in aut.edges[q]:
            if not seen[dst]:
                seen[dst] = True
                queue.append(dst)
    return [q for q in range(aut.n_states) if seen[q]]


def _restrict(aut: BuchiAutomaton, keep: list[int]) -> BuchiAutomaton:
    if aut.initial not in keep:
        keep = [aut.initial] + [q for q in keep if q != aut.initial]
    remap = {old: new for new, old in enumerate(keep)}
    kept = set(keep)
    edges = tuple(
        tuple((g, remap[dst]) for g, dst in aut.edges[old] if dst in kept)
        for old in keep
    )
    marked = frozenset(remap[q] for q in aut.marked if q in kept)
    return BuchiAutomaton(len(keep), remap[aut.initial], edges, marked, aut.mode)


def _live_states(aut: BuchiAutomaton) -> list[int]:
    """States from which some marked cycle is reachable (nonempty language)."""
    n = aut.n_states
    succs = [sorted({dst for _, dst in aut.edges[q]}) for q in range(n)]
    scc_of = _tarjan_sccs(n, succs)
    cyclic = set()
    members: dict[int, list[int]] = {}
    for q in range(n):
        members.setdefault(scc_of[q], []).append(q)
    for scc, qs in members.items():
        if len(qs) > 1:
            if any(q in aut.marked for q in qs):
                cyclic.add(scc)
        else:
            q = qs[0]
            if q in aut.marked and q in succs[q]:
                cyclic.add(scc)
    good = [q for q in range(n) if scc_of[q] in cyclic]
    # Backward closure: anything that reaches a good state stays.
    preds: list[list[int]] = [[] for _ in range(n)]
    for q in range(n):
        for dst in succs[q]:
            preds[dst].append(q)
    alive = [False] * n
    queue = list(good)
    for q in good:
        alive[q] = True
    while queue:
        q = queue.pop()
        for p in preds[q]:
            if not alive[p]:
                alive[p] = True
                queue.append(p)
    return [q for q in range(n) if alive[q]]


def _merge_duplicates(aut: BuchiAutomaton) -> BuchiAutomaton:
    """Collapse states with identical acceptance flag and outgoing edges."""
    while True:
        signature: dict[tuple, int] = {}
        remap = list(range(aut.n_states))
        changed = False
        for q in range(aut.n_states):
            sig = (q in aut.marked, tuple(sorted(set(aut.edges[q]))))
            if sig in signature:
                remap[q] = signature[sig]
                changed = True
            else:
                signature[sig] = q
        if not changed:
            return aut
        keep = sorted(set(remap))
        renum = {old: i for i, old in enumerate(keep)}
        edges = tuple(
            tuple(sorted({(g, renum[remap[dst]]) for g, dst in aut.edges[old]}))
            for old in keep
        )
        marked = frozenset(renum[remap[q]] for q in aut.marked if remap[q] == q)
        aut = BuchiAutomaton(
            len(keep), renum[remap[aut.initial]], edges, marked, aut.mode
        )


def _drop_subsumed_edges(aut: BuchiAutomaton) -> BuchiAutomaton:
    edges = []
    for q in range(aut.n_states):
        by_dst: dict[int, list[Guard]] = {}
        for g, dst in aut.edges[q]:
            by_dst.setdefault(dst, []).append(g)
        kept: list[Edge] = []
        for g, dst in aut.edges[q]:
            gset = set(g)
            dominated = any(
                set(other) < gset for other in by_dst[dst]
            )
            if not dominated and (g, dst) not in kept:
                kept.append((g, dst))
        edges.append(tuple(kept))
    return BuchiAutomaton(aut.n_states, aut.initial, tuple(edges), aut.marked, aut.mode)


def _simplify(aut: BuchiAutomaton) -> BuchiAutomaton:
    aut = _restrict(aut, _reachable(aut))
    aut = _restrict(aut, _live_states(aut))
    aut = _drop_subsumed_edges(aut)
    aut = _merge_duplicates(aut)
    aut = _restrict(aut, _reachable(aut))
    return aut


# ---------------------------------------------------------------------------
# Specification automata and membership

def spec_to_ucw(f: Formula) -> BuchiAutomaton:
    """Universal co-Büchi automaton accepting exactly the models of ``f``.

    Structurally this is the Büchi automaton of the negation with its
    accepting set read as the rejecting set.
    """
    nba = ltl_to_nba(negate(f))
    return BuchiAutomaton(nba.n_states, nba.initial, nba.edges, nba.marked, "ucw")


def lasso_membership(aut: BuchiAutomaton, w: Lasso, declared: Optional[Iterable[str]] = None) -> bool:
    """Does some run over prefix·loop^ω visit accepting states infinitely
    often?  Decided on the product with the lasso positions."""
    if aut.mode != "nba":
        raise FormulaError("membership is defined for nondeterministic Büchi mode")
    if declared is not None:
        extra = aut.propositions() - frozenset(declared)
        if extra:
            raise FormulaError(f"guards mention undeclared propositions: {sorted(extra)}")
    plen, llen = len(w.prefix), len(w.loop)
    total = plen + llen

    def succ_pos(i: int) -> int:
        return i + 1 if i + 1 < total else plen

    # Product nodes (state, position), explored on the fly.
    start = (aut.initial, 0)
    ids = {start: 0}
    nodes = [start]
    succs: list[list[int]] = []
    queue = [start]
    while queue:
        q, pos = queue.pop(0)
        val = w.valuation(pos)
        row = []
        for g, dst in aut.edges[q]:
            if guard_satisfied(g, val):
                nxt = (dst, succ_pos(pos))
                if nxt not in ids:
                    ids[nxt] = len(nodes)
                    nodes.append(nxt)
                    queue.append(nxt)
                row.append(ids[nxt])
        succs.append(row)
    scc_of = _tarjan_sccs(len(nodes), succs)
    members: dict[int, list[int]] = {}
    for v in range(len(nodes)):
        members.setdefault(scc_of[v], []).append(v)
    for qs in members.values():
        cyclic = len(qs) > 1 or qs[0] in succs[qs[0]]
        if cyclic and any(nodes[v][0] in aut.marked for v in qs):
            return True
    return False


def ucw_accepts(aut: BuchiAutomaton, w: Lasso) -> bool:
    """Universal co-Büchi acceptance: no run hits rejecting states
    infinitely often."""
    if aut.mode != "ucw":
        raise FormulaError("ucw acceptance needs universal co-Büchi mode")
    return not lasso_membership(aut.as_nba(), w)
