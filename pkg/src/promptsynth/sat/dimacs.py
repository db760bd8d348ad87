"""DIMACS CNF emission and the external-solver escape hatch.

External solvers are expected to follow the SAT-competition output
conventions: an ``s SATISFIABLE``/``s UNSATISFIABLE`` status line plus
``v`` literal lines, or exit codes 10/20 when no status line is printed.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from typing import Optional

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


def write_dimacs(n_vars: int, flat, out) -> None:
    """Write a zero-terminated flat clause buffer as standard CNF text."""
    n_clauses = sum(1 for lit in flat if lit == 0)
    out.write(f"p cnf {n_vars} {n_clauses}\n")
    row: list[str] = []
    for lit in flat:
        row.append(str(lit))
        if lit == 0:
            out.write(" ".join(row) + "\n")
            row.clear()


def dimacs_text(n_vars: int, flat) -> str:
    import io

    buf = io.StringIO()
    write_dimacs(n_vars, flat, buf)
    return buf.getvalue()


def parse_solver_output(text: str, returncode: int, n_vars: int):
    status = None
    true_lits: set[int] = set()
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            else:
                status = UNKNOWN
        elif line.startswith("v "):
            for tok in line[2:].split():
                lit = int(tok)
                if lit > 0:
                    true_lits.add(lit)
    if status is None:
        status = {10: SAT, 20: UNSAT}.get(returncode, UNKNOWN)
    if status == SAT:
        return SAT, [v + 1 in true_lits for v in range(n_vars)]
    return status, None


def solve_external(command: str, n_vars: int, flat, deadline: Optional[float] = None):
    """Run an external DIMACS solver; the CNF path is appended to the
    command line."""
    timeout = None
    if deadline is not None:
        timeout = max(deadline - time.monotonic(), 0.1)
    with tempfile.NamedTemporaryFile(
        "w", suffix=".cnf", prefix="promptsynth", delete=False
    ) as tmp:
        write_dimacs(n_vars, flat, tmp)
        path = tmp.name
    try:
        argv = shlex.split(command) + [path]
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired:
            return UNKNOWN, None
        except OSError as err:
            raise RuntimeError(f"cannot run external solver {command!r}: {err}")
        return parse_solver_output(proc.stdout, proc.returncode, n_vars)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
