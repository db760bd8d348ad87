"""Independent verification of strategies.

Model checking goes through the automata product route, deliberately
sharing no code with the color-based synthesis pipeline: prompt
formulas are checked via bounded unfolding, so a machine produced by
the synthesizer is always judged by a second, unrelated semantics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .automata import _tarjan_sccs, guard_satisfied, ltl_to_nba
from .formulas import (
    Formula,
    FormulaError,
    Lasso,
    eval_on_lasso,
    has_prompt,
    negate,
    propositions,
    size,
    unfold_prompt,
)
from .machine import MealyMachine, wildcard_machine


@dataclass(frozen=True)
class CheckReport:
    holds: bool
    inputs: Optional[Lasso] = None
    play: Optional[Lasso] = None
    note: str = ""

    def __bool__(self) -> bool:
        return self.holds


def model_check_ltl(machine: MealyMachine, f: Formula) -> CheckReport:
    """Does every input sequence yield a play satisfying ``f``?

    Decided by emptiness of the product of the machine (with free input
    choice) and the Büchi automaton of the negation; a non-empty product
    yields an input lasso plus the induced play as a counterexample.
    """
    if has_prompt(f):
        raise FormulaError("formula has a prompt operator; use model_check_prompt")
    declared = frozenset(machine.inputs) | frozenset(machine.outputs)
    extra = propositions(f) - declared
    if extra:
        raise FormulaError(
            f"formula propositions {sorted(extra)} are outside the machine alphabet"
        )
    nba = ltl_to_nba(negate(f))
    n_vals = machine.n_input_valuations
    letters = [
        [machine.input_valuation(i) | machine.output[m][i] for i in range(n_vals)]
        for m in range(machine.n_states)
    ]

    start = (nba.initial, machine.initial)
    ids = {start: 0}
    nodes = [start]
    # Parallel edge lists: successor node id and the input index taken.
    succ_nodes: list[list[int]] = []
    succ_inputs: list[list[int]] = []
    queue = [start]
    while queue:
        q, m = queue.pop(0)
        row_nodes: list[int] = []
        row_inputs: list[int] = []
        for i in range(n_vals):
            letter = letters[m][i]
            m_dst = machine.update[m][i]
            for guard, q_dst in nba.edges[q]:
                if guard_satisfied(guard, letter):
                    node = (q_dst, m_dst)
                    if node not in ids:
                        ids[node] = len(nodes)
                        nodes.append(node)
                        queue.append(node)
                    row_nodes.append(ids[node])
                    row_inputs.append(i)
        succ_nodes.append(row_nodes)
        succ_inputs.append(row_inputs)

    scc_of = _tarjan_sccs(len(nodes), succ_nodes)
    members: dict[int, list[int]] = {}
    for v in range(len(nodes)):
        members.setdefault(scc_of[v], []).append(v)
    witness = None
    for scc, vs in sorted(members.items()):
        cyclic = len(vs) > 1 or vs[0] in succ_nodes[vs[0]]
        if cyclic:
            accepting = [v for v in vs if nodes[v][0] in nba.marked]
            if accepting:
                witness = min(accepting)
                break
    if witness is None:
        return CheckReport(True)

    def path_inputs(source: int, target: int, need_edge: bool) -> list[int]:
        """Input indices along a shortest source->target path (BFS); with
        ``need_edge`` the path has at least one edge (cycle search)."""
        if source == target and not need_edge:
            return []
        parent: dict[int, tuple[int, int]] = {}
        visited = {source}
        frontier = [source]
        while frontier:
            nxt = []
            for v in frontier:
                for w, i in zip(succ_nodes[v], succ_inputs[v]):
                    if w == target:
                        steps = [i]
                        node = v
                        while node != source:
                            node, pi = parent[node]
                            steps.append(pi)
                        return list(reversed(steps))
                    if w not in visited:
                        visited.add(w)
                        parent[w] = (v, i)
                        nxt.append(w)
            frontier = nxt
        raise AssertionError("target vanished during counterexample extraction")

    prefix_inputs = path_inputs(0, witness, need_edge=False)
    loop_inputs = path_inputs(witness, witness, need_edge=True)
    prefix_vals = [machine.input_valuation(i) for i in prefix_inputs]
    loop_vals = [machine.input_valuation(i) for i in loop_inputs]
    inputs = Lasso(tuple(prefix_vals), tuple(loop_vals))
    play_prefix = machine.play(prefix_vals + loop_vals)
    play = Lasso(
        tuple(play_prefix[: len(prefix_vals)]),
        tuple(play_prefix[len(prefix_vals):]),
    )
    report = CheckReport(False, inputs, play)
    # A counterexample that does not replay is an internal error.
    if eval_on_lasso(f, play):
        raise AssertionError("counterexample does not witness a violation")
    return report


def model_check_prompt(machine: MealyMachine, f: Formula, k: int) -> CheckReport:
    """Does the machine realize ``f`` with respect to the bound ``k``?

    Reduced to plain model checking of the k-unfolding.
    """
    if k < 0:
        raise FormulaError("bound k must be nonnegative")
    return model_check_ltl(machine, unfold_prompt(f, k))


def minimal_realized_bound(
    machine: MealyMachine, f: Formula, cap: Optional[int] = None
) -> Optional[int]:
    """Smallest k <= cap such that the machine realizes ``f`` w.r.t. k.

    Monotonicity in k justifies a doubling then binary search; the
    default cap follows the machine-size-times-exponential shape.
    """
    if cap is None:
        cap = machine.n_states * (2 ** size(f))
    if not has_prompt(f):
        return 0 if model_check_ltl(machine, f).holds else None
    if model_check_prompt(machine, f, 0).holds:
        return 0
    # Gallop to the first holding bound.
    lo = 0  # known failing
    hi = 1
    while hi <= cap and not model_check_prompt(machine, f, hi).holds:
        lo = hi
        hi *= 2
    if hi > cap:
        if lo < cap and model_check_prompt(machine, f, cap).holds:
            hi = cap
        else:
            return None  # cap reached
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if model_check_prompt(machine, f, mid).holds:
            hi = mid
        else:
            lo = mid
    return hi


def strip_color(machine: MealyMachine, color: str = "p") -> MealyMachine:
    """Projection: remove the color proposition from every output."""
    if color not in machine.outputs:
        return machine
    return machine.without_output(color)


def round_robin_machine(r: int) -> MealyMachine:
    """Grant each of r resources in turn, ignoring the requests."""
    if r < 1:
        raise FormulaError("need at least one resource")
    inputs = tuple(f"q{i}" for i in range(1, r + 1))
    outputs = tuple(f"p{i}" for i in range(1, r + 1))
    cycle = [([f"p{s + 1}"], (s + 1) % r) for s in range(r)]
    return wildcard_machine(inputs, outputs, cycle)


# ---------------------------------------------------------------------------
# Reference strategies for the six-resource arbiter with two prompt
# resources, shipped in the shared machine JSON format.

FIXTURE_NAMES = ("sigma_6_3", "sigma_12_1")


def load_fixture(name: str) -> MealyMachine:
    if name not in FIXTURE_NAMES:
        raise FormulaError(f"unknown fixture {name!r}; have {FIXTURE_NAMES}")
    text = resources.files("promptsynth.data").joinpath(f"{name}.json").read_text()
    return MealyMachine.from_json(text)


def sigma_6_3() -> MealyMachine:
    """Six-state cycle realizing the (6,2)-arbiter with color blocks of 3."""
    return load_fixture("sigma_6_3")


def sigma_12_1() -> MealyMachine:
    """Twelve-state cycle realizing the (6,2)-arbiter with alternating color."""
    return load_fixture("sigma_12_1")
