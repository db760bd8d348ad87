"""Finite-state strategies: Mealy machines over input/output valuations.

A machine reads a valuation of the input propositions each step and
answers with a valuation of the output propositions; both the successor
state and the output depend on (state, input valuation).  Input
valuations are indexed by bitmask over the declared input order, so the
transition tables are dense and totality is structural.

The JSON form uses one transition record per (state, input) with ``"*"``
standing for all input valuations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class MealyMachine:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    n_states: int
    initial: int
    update: tuple[tuple[int, ...], ...]       # [state][input index] -> state
    output: tuple[tuple[frozenset[str], ...], ...]

    def __post_init__(self):
        n_vals = 1 << len(self.inputs)
        if self.n_states < 1:
            raise MachineError("machine needs at least one state")
        if not 0 <= self.initial < self.n_states:
            raise MachineError("initial state out of range")
        if len(self.update) != self.n_states or len(self.output) != self.n_states:
            raise MachineError("transition tables must cover every state")
        for row_u, row_o in zip(self.update, self.output):
            if len(row_u) != n_vals or len(row_o) != n_vals:
                raise MachineError("transition tables must cover every input valuation")
            if any(not 0 <= t < self.n_states for t in row_u):
                raise MachineError("transition target out of range")
            for vals in row_o:
                if not vals <= frozenset(self.outputs):
                    raise MachineError(f"output {set(vals)} not within declared outputs")

    # -- input valuation indexing ---------------------------------------

    def input_index(self, valuation: Iterable[str]) -> int:
        vals = frozenset(valuation)
        unknown = vals - frozenset(self.inputs)
        if unknown:
            raise MachineError(f"unknown input propositions: {sorted(unknown)}")
        idx = 0
        for bit, name in enumerate(self.inputs):
            if name in vals:
                idx |= 1 << bit
        return idx

    def input_valuation(self, idx: int) -> frozenset[str]:
        return frozenset(
            name for bit, name in enumerate(self.inputs) if idx & (1 << bit)
        )

    @property
    def n_input_valuations(self) -> int:
        return 1 << len(self.inputs)

    # -- running ----------------------------------------------------------

    def step(self, state: int, input_valuation: frozenset[str]) -> tuple[int, frozenset[str]]:
        idx = self.input_index(input_valuation)
        return self.update[state][idx], self.output[state][idx]

    def play(self, input_word: Iterable[frozenset[str]]) -> list[frozenset[str]]:
        """The combined input+output valuations along an input word."""
        state = self.initial
        out = []
        for val in input_word:
            idx = self.input_index(val)
            out.append(frozenset(val) | self.output[state][idx])
            state = self.update[state][idx]
        return out

    def without_output(self, prop: str) -> "MealyMachine":
        return MealyMachine(
            self.inputs,
            tuple(o for o in self.outputs if o != prop),
            self.n_states,
            self.initial,
            self.update,
            tuple(tuple(v - {prop} for v in row) for row in self.output),
        )

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        transitions = []
        n_vals = self.n_input_valuations
        for s in range(self.n_states):
            uniform = all(
                self.update[s][i] == self.update[s][0]
                and self.output[s][i] == self.output[s][0]
                for i in range(n_vals)
            )
            if uniform:
                transitions.append(
                    {
                        "from": s,
                        "input": "*",
                        "to": self.update[s][0],
                        "output": sorted(self.output[s][0]),
                    }
                )
            else:
                for i in range(n_vals):
                    transitions.append(
                        {
                            "from": s,
                            "input": sorted(self.input_valuation(i)),
                            "to": self.update[s][i],
                            "output": sorted(self.output[s][i]),
                        }
                    )
        doc = {
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "states": self.n_states,
            "initial": self.initial,
            "transitions": transitions,
        }
        return json.dumps(doc, indent=2)

    @staticmethod
    def from_json(text: str) -> "MealyMachine":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise MachineError(f"malformed machine JSON: {err}")
        try:
            inputs = tuple(doc["inputs"])
            outputs = tuple(doc["outputs"])
            n_states = int(doc["states"])
            initial = int(doc.get("initial", 0))
            records = doc["transitions"]
        except (KeyError, TypeError) as err:
            raise MachineError(f"machine JSON missing field: {err}")
        n_vals = 1 << len(inputs)
        update: list[list[int | None]] = [[None] * n_vals for _ in range(n_states)]
        output: list[list[frozenset[str] | None]] = [
            [None] * n_vals for _ in range(n_states)
        ]
        index_of = {}
        probe = MealyMachine(
            inputs,
            outputs,
            1,
            0,
            ((0,) * n_vals,),
            ((frozenset(),) * n_vals,),
        )
        for rec in records:
            try:
                src = int(rec["from"])
                dst = int(rec["to"])
                out_vals = frozenset(rec["output"])
                inp = rec["input"]
            except (KeyError, TypeError) as err:
                raise MachineError(f"malformed transition record: {rec!r} ({err})")
            if not 0 <= src < n_states or not 0 <= dst < n_states:
                raise MachineError(f"transition state out of range: {rec!r}")
            if inp == "*":
                indices = range(n_vals)
            else:
                indices = [probe.input_index(inp)]
            for idx in indices:
                if update[src][idx] is not None:
                    raise MachineError(
                        f"duplicate transition for state {src}, "
                        f"input {sorted(probe.input_valuation(idx))}"
                    )
                update[src][idx] = dst
                output[src][idx] = out_vals
        for s in range(n_states):
            for idx in range(n_vals):
                if update[s][idx] is None:
                    raise MachineError(
                        f"missing transition for state {s}, "
                        f"input {sorted(probe.input_valuation(idx))}"
                    )
        return MealyMachine(
            inputs,
            outputs,
            n_states,
            initial,
            tuple(tuple(row) for row in update),
            tuple(tuple(row) for row in output),
        )

    def to_dot(self, name: str = "strategy") -> str:
        def fmt(vals):
            return "{" + " ".join(sorted(vals)) + "}"

        lines = [f"digraph {name} {{", "  rankdir=LR;", '  init [shape=point];']
        for s in range(self.n_states):
            lines.append(f"  s{s} [shape=circle label=\"{s}\"];")
        lines.append(f"  init -> s{self.initial};")
        n_vals = self.n_input_valuations
        for s in range(self.n_states):
            groups: dict[tuple[int, frozenset[str]], list[int]] = {}
            for i in range(n_vals):
                groups.setdefault((self.update[s][i], self.output[s][i]), []).append(i)
            for (dst, out_vals), indices in groups.items():
                if len(indices) == n_vals:
                    label = f"*/{fmt(out_vals)}"
                else:
                    ins = ",".join(fmt(self.input_valuation(i)) for i in indices)
                    label = f"{ins}/{fmt(out_vals)}"
                lines.append(f'  s{s} -> s{dst} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


def wildcard_machine(
    inputs: Iterable[str],
    outputs: Iterable[str],
    cycle: list[tuple[Iterable[str], int]],
    initial: int = 0,
) -> MealyMachine:
    """Machine whose moves ignore the input: list of (output, successor)."""
    inputs = tuple(inputs)
    outputs = tuple(outputs)
    n_vals = 1 << len(inputs)
    update = tuple(tuple([dst] * n_vals) for _, dst in cycle)
    output = tuple(tuple([frozenset(o)] * n_vals) for o, _ in cycle)
    return MealyMachine(inputs, outputs, len(cycle), initial, update, output)
