"""SAT backends: compiled CDCL core with a pure-Python twin.

The compiled extension is preferred when it imported cleanly; setting
``PROMPTSYNTH_SOLVER`` (or passing ``backend=``) selects ``compiled``,
``python``, or an external DIMACS solver command.
"""

from __future__ import annotations

import os
from typing import Optional

from . import cdcl
from .cdcl import SAT, UNKNOWN, UNSAT
from .dimacs import dimacs_text, solve_external, write_dimacs

try:
    from . import _cdcl as _compiled
except ImportError:  # pragma: no cover - depends on the build environment
    _compiled = None


def has_compiled() -> bool:
    return _compiled is not None


def default_backend() -> str:
    env = os.environ.get("PROMPTSYNTH_SOLVER", "").strip()
    return env or "auto"


def solve(
    n_vars: int,
    flat,
    deadline: Optional[float] = None,
    backend: str = "auto",
):
    """Solve a zero-terminated flat clause buffer of DIMACS literals.

    Returns (status, model) with status in {"sat", "unsat", "unknown"}
    and model a per-variable boolean list when satisfiable.
    """
    if backend == "auto":
        backend = default_backend()
    if backend == "auto":
        backend = "compiled" if _compiled is not None else "python"
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled SAT core is not available in this build")
        return _compiled.solve_flat(n_vars, flat, deadline)
    if backend == "python":
        return cdcl.solve_flat(n_vars, flat, deadline)
    # Anything else is an external solver command line.
    return solve_external(backend, n_vars, flat, deadline)
