"""SAT-based bounded synthesis against universal co-Büchi specifications.

The encoding asks for a Mealy machine of a fixed size whose run graph
with the specification automaton admits a bounded annotation, i.e. no
reachable cycle passes through a rejecting automaton state.  Universal
quantification over inputs is expanded explicitly (one transition row
per input valuation), successor states are one-hot, and annotation
counters are binary with width ceil(log2(n*|Q|+1)).

Structural analysis keeps the clause count down without changing the
answer: automaton states that cannot reach a rejecting cycle are
dropped, rejecting states with an unconditional self-loop turn into
plain reachability prohibitions, and counter comparisons are emitted
only inside strongly connected components that contain a rejecting
state (a lasso through a rejecting pair projects into a single SCC).
"""

from __future__ import annotations

import time
from array import array
from dataclasses import dataclass
from typing import Optional

from . import sat
from .automata import BuchiAutomaton, Guard, _tarjan_sccs, guard_satisfied
from .formulas import FormulaError, PropPartition
from .machine import MealyMachine

REALIZABLE = "realizable"
UNREALIZABLE_AT_SIZE = "unrealizable_at_size"
UNKNOWN = "unknown"


class EncodingError(RuntimeError):
    """A synthesized machine failed its own certificate check."""


@dataclass
class RunGraphAnnotation:
    """Certificate that no rejecting automaton state repeats unboundedly:
    reachable (ucw state, machine state) pairs with counters that rise
    strictly through rejecting states."""

    reachable: set[tuple[int, int]]
    counters: dict[tuple[int, int], int]

    @property
    def max_counter(self) -> int:
        return max(self.counters.values(), default=0)


@dataclass
class SynthesisResult:
    status: str
    machine: Optional[MealyMachine] = None
    annotation: Optional[RunGraphAnnotation] = None
    n_vars: int = 0
    n_clauses: int = 0
    solve_seconds: float = 0.0


@dataclass
class _Analysis:
    relevant: list[int]
    forbidden: set[int]
    counterful: set[int]
    scc_of: list[int]
    rejecting: frozenset[int]


def _analyze_ucw(ucw: BuchiAutomaton) -> _Analysis:
    n = ucw.n_states
    rejecting = ucw.marked
    succs = [sorted({dst for _, dst in ucw.edges[q]}) for q in range(n)]
    scc_of = _tarjan_sccs(n, succs)
    members: dict[int, list[int]] = {}
    for q in range(n):
        members.setdefault(scc_of[q], []).append(q)
    cyclic_sccs = set()
    for scc, qs in members.items():
        if len(qs) > 1 or qs[0] in succs[qs[0]]:
            cyclic_sccs.add(scc)
    forbidden = {
        q
        for q in rejecting
        if any(not g and dst == q for g, dst in ucw.edges[q])
    }
    counterful_sccs = {
        scc
        for scc, qs in members.items()
        if scc in cyclic_sccs and any(q in rejecting for q in qs)
    }
    counterful = {
        q for q in range(n) if scc_of[q] in counterful_sccs and q not in forbidden
    }
    # Relevance: can reach a state that can actually cause rejection.
    seeds = {q for q in rejecting if scc_of[q] in cyclic_sccs} | forbidden
    preds: list[list[int]] = [[] for _ in range(n)]
    for q in range(n):
        for dst in succs[q]:
            preds[dst].append(q)
    alive = [False] * n
    queue = sorted(seeds)
    for q in queue:
        alive[q] = True
    while queue:
        q = queue.pop()
        for p in preds[q]:
            if not alive[p]:
                alive[p] = True
                queue.append(p)
    relevant = [q for q in range(n) if alive[q]]
    return _Analysis(relevant, forbidden, counterful, scc_of, rejecting)


class _Cnf:
    def __init__(self):
        self.next_var = 1
        self.flat = array("i")
        self.n_clauses = 0

    def new_var(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def add(self, lits) -> None:
        self.flat.extend(lits)
        self.flat.append(0)
        self.n_clauses += 1


def _split_guard(guard: Guard, input_set: frozenset[str]):
    ins = []
    outs = []
    for name, pol in guard:
        (ins if name in input_set else outs).append((name, pol))
    return ins, outs


def _trivial_machine(n: int, parts: PropPartition, outputs: tuple[str, ...]) -> MealyMachine:
    n_vals = 1 << len(parts.inputs)
    return MealyMachine(
        parts.inputs,
        outputs,
        n,
        0,
        tuple(tuple([0] * n_vals) for _ in range(n)),
        tuple(tuple([frozenset()] * n_vals) for _ in range(n)),
    )


def bounded_synthesis(
    ucw: BuchiAutomaton,
    n: int,
    parts: PropPartition,
    budget: Optional[float] = None,
    backend: str = "auto",
    symmetry: bool = False,
) -> SynthesisResult:
    """Search for a size-n Mealy machine all of whose plays the UCW accepts.

    Returns a verified machine, a proof-backed ``unrealizable_at_size``,
    or ``unknown`` on budget exhaustion.  ``symmetry`` adds optional
    verdict-preserving canonicity constraints (breadth-first state
    ordering with padding allowed for unreachable states).
    """
    if ucw.mode != "ucw":
        raise FormulaError("bounded synthesis needs a universal co-Büchi automaton")
    if n < 1:
        raise FormulaError("machine size must be at least 1")
    props = ucw.propositions()
    allowed = parts.all_props | {parts.color}
    if not props <= allowed:
        raise FormulaError(
            f"automaton propositions {sorted(props - allowed)} are outside "
            "the declared partition"
        )
    outputs = parts.outputs + ((parts.color,) if parts.color in props else ())
    input_set = frozenset(parts.inputs)
    n_inputs = len(parts.inputs)
    n_vals = 1 << n_inputs
    input_vals = [
        frozenset(name for b, name in enumerate(parts.inputs) if i & (1 << b))
        for i in range(n_vals)
    ]

    analysis = _analyze_ucw(ucw)
    if ucw.initial not in analysis.relevant:
        machine = _trivial_machine(n, parts, outputs)
        ok, annotation = check_run_graph(machine, ucw, with_annotation=True)
        assert ok
        return SynthesisResult(REALIZABLE, machine, annotation)
    if ucw.initial in analysis.forbidden:
        # Every run is rejected from the start; no machine of any size helps.
        return SynthesisResult(UNREALIZABLE_AT_SIZE)

    deadline = time.monotonic() + budget if budget is not None else None
    cnf = _Cnf()

    # Machine variables.
    t_var = [
        [[cnf.new_var() for _ in range(n)] for _ in range(n_vals)] for _ in range(n)
    ]
    z_var = [
        [{o: cnf.new_var() for o in outputs} for _ in range(n_vals)]
        for _ in range(n)
    ]
    for m in range(n):
        for i in range(n_vals):
            row = t_var[m][i]
            cnf.add(row)
            for a in range(n):
                for b in range(a + 1, n):
                    cnf.add((-row[a], -row[b]))

    # Run-graph variables for relevant, non-forbidden automaton states.
    encoded = [q for q in analysis.relevant if q not in analysis.forbidden]
    r_var = {q: [cnf.new_var() for _ in range(n)] for q in encoded}
    width = max((n * ucw.n_states).bit_length(), 1)
    c_var = {
        q: [[cnf.new_var() for _ in range(width)] for _ in range(n)]
        for q in encoded
        if q in analysis.counterful
    }

    cnf.add((r_var[ucw.initial][0],))
    if ucw.initial in c_var:
        for bit in c_var[ucw.initial][0]:
            cnf.add((-bit,))

    compare_cache: dict[tuple[int, int, int, int], int] = {}

    def comparator(src_q: int, src_m: int, dst_q: int, dst_m: int) -> int:
        key = (src_q, src_m, dst_q, dst_m)
        got = compare_cache.get(key)
        if got is not None:
            return got
        strict = dst_q in analysis.rejecting
        src_bits = c_var[src_q][src_m]
        dst_bits = c_var[dst_q][dst_m]
        ge = [cnf.new_var() for _ in range(width)]
        for b in range(width - 1, 0, -1):
            d, s, nxt = dst_bits[b], src_bits[b], ge[b - 1]
            cnf.add((-ge[b], d, -s))
            cnf.add((-ge[b], d, nxt))
            cnf.add((-ge[b], -s, nxt))
        d, s = dst_bits[0], src_bits[0]
        if strict:
            cnf.add((-ge[0], d))
            cnf.add((-ge[0], -s))
        else:
            cnf.add((-ge[0], d, -s))
        trigger = ge[width - 1]
        compare_cache[key] = trigger
        return trigger

    relevant_set = set(analysis.relevant)
    for q in encoded:
        for guard, q_dst in ucw.edges[q]:
            if q_dst not in relevant_set:
                continue
            in_lits, out_lits = _split_guard(guard, input_set)
            for i in range(n_vals):
                if any((name in input_vals[i]) != pol for name, pol in in_lits):
                    continue
                for m in range(n):
                    base = [-r_var[q][m]]
                    for name, pol in out_lits:
                        zv = z_var[m][i][name]
                        base.append(-zv if pol else zv)
                    if q_dst in analysis.forbidden:
                        cnf.add(base)
                        continue
                    same_counter_scc = (
                        q in analysis.counterful
                        and q_dst in analysis.counterful
                        and analysis.scc_of[q] == analysis.scc_of[q_dst]
                    )
                    for m_dst in range(n):
                        head = base + [-t_var[m][i][m_dst]]
                        cnf.add(head + [r_var[q_dst][m_dst]])
                        if same_counter_scc:
                            cnf.add(head + [comparator(q, m, q_dst, m_dst)])

    if symmetry and n >= 2:
        pad = {j: cnf.new_var() for j in range(1, n)}
        for j in range(1, n - 1):
            cnf.add((-pad[j], pad[j + 1]))
        for j in range(1, n):
            for i in range(n_vals):
                cnf.add((-pad[j], t_var[j][i][j]))
                for o in outputs:
                    cnf.add((-pad[j], -z_var[j][i][o]))
            incoming = [pad[j]]
            for m in range(j):
                for i in range(n_vals):
                    incoming.append(t_var[m][i][j])
            cnf.add(incoming)

    started = time.monotonic()
    status, model = sat.solve(cnf.next_var - 1, cnf.flat, deadline, backend=backend)
    elapsed = time.monotonic() - started

    if status == sat.UNKNOWN:
        return SynthesisResult(
            UNKNOWN, n_vars=cnf.next_var - 1, n_clauses=cnf.n_clauses,
            solve_seconds=elapsed,
        )
    if status == sat.UNSAT:
        return SynthesisResult(
            UNREALIZABLE_AT_SIZE, n_vars=cnf.next_var - 1,
            n_clauses=cnf.n_clauses, solve_seconds=elapsed,
        )

    def truth(v: int) -> bool:
        return model[v - 1]

    update = []
    output = []
    for m in range(n):
        urow = []
        orow = []
        for i in range(n_vals):
            dst = next(m2 for m2 in range(n) if truth(t_var[m][i][m2]))
            urow.append(dst)
            orow.append(frozenset(o for o in outputs if truth(z_var[m][i][o])))
        update.append(tuple(urow))
        output.append(tuple(orow))
    machine = MealyMachine(
        parts.inputs, outputs, n, 0, tuple(update), tuple(output)
    )
    ok, annotation = check_run_graph(machine, ucw, with_annotation=True)
    if not ok:
        raise EncodingError(
            "solver model does not certify: run graph has a rejecting cycle"
        )
    return SynthesisResult(
        REALIZABLE, machine, annotation,
        n_vars=cnf.next_var - 1, n_clauses=cnf.n_clauses, solve_seconds=elapsed,
    )


def check_run_graph(
    machine: MealyMachine,
    ucw: BuchiAutomaton,
    with_annotation: bool = False,
):
    """Certificate check: the product of machine and UCW, restricted to
    reachable pairs, has no cycle through a rejecting state.

    With ``with_annotation`` also returns the canonical counter
    annotation (None when the check fails).
    """
    if ucw.mode != "ucw":
        raise FormulaError("run graph check needs a universal co-Büchi automaton")
    n_vals = machine.n_input_valuations
    letters = [
        [
            machine.input_valuation(i) | machine.output[m][i]
            for i in range(n_vals)
        ]
        for m in range(machine.n_states)
    ]

    start = (ucw.initial, machine.initial)
    ids = {start: 0}
    nodes = [start]
    succs: list[list[int]] = []
    queue = [start]
    while queue:
        q, m = queue.pop(0)
        row = set()
        for i in range(n_vals):
            letter = letters[m][i]
            m_dst = machine.update[m][i]
            for guard, q_dst in ucw.edges[q]:
                if guard_satisfied(guard, letter):
                    node = (q_dst, m_dst)
                    if node not in ids:
                        ids[node] = len(nodes)
                        nodes.append(node)
                        queue.append(node)
                    row.add(ids[node])
        succs.append(sorted(row))

    scc_of = _tarjan_sccs(len(nodes), succs)
    members: dict[int, list[int]] = {}
    for v in range(len(nodes)):
        members.setdefault(scc_of[v], []).append(v)
    for scc, vs in members.items():
        cyclic = len(vs) > 1 or vs[0] in succs[vs[0]]
        if cyclic and any(nodes[v][0] in ucw.marked for v in vs):
            return (False, None) if with_annotation else False
    if not with_annotation:
        return True

    # Canonical annotation: longest path through the condensation counting
    # rejecting nodes, with the initial pair pinned to zero.  When the
    # check passes every rejecting node sits in a trivial SCC, so the SCC
    # weight is simply "is this a rejecting singleton".
    def weight(scc: int) -> int:
        vs = members[scc]
        if len(vs) == 1 and vs[0] != 0 and nodes[vs[0]][0] in ucw.marked:
            return 1
        return 0

    # Tarjan numbers SCCs with successors first, so descending index is a
    # predecessors-first topological order.
    incoming: dict[int, int] = {}
    lam: dict[int, int] = {}
    for scc in sorted(members, reverse=True):
        lam[scc] = incoming.get(scc, 0) + weight(scc)
        for v in members[scc]:
            for w in succs[v]:
                target = scc_of[w]
                if target != scc:
                    incoming[target] = max(incoming.get(target, 0), lam[scc])
    counters = {nodes[v]: lam[scc_of[v]] for v in range(len(nodes))}
    annotation = RunGraphAnnotation(set(nodes), counters)
    return True, annotation
