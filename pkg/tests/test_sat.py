import itertools
import os
import random
import stat
import time
from array import array

import pytest

from promptsynth import sat
from promptsynth.sat import cdcl, dimacs

BACKENDS = ["python"] + (["compiled"] if sat.has_compiled() else [])


def brute_force(n_vars: int, clauses: list[list[int]]):
    for bits in itertools.product([False, True], repeat=n_vars):
        if all(
            any(bits[abs(l) - 1] == (l > 0) for l in clause) for clause in clauses
        ):
            return True
    return False


def to_flat(clauses):
    flat = array("i")
    for clause in clauses:
        flat.extend(clause)
        flat.append(0)
    return flat


def random_cnf(rng, n_vars, n_clauses, width=3):
    clauses = []
    for _ in range(n_clauses):
        k = rng.randint(1, width)
        clause = [
            rng.randint(1, n_vars) * rng.choice([1, -1]) for _ in range(k)
        ]
        clauses.append(clause)
    return clauses


def pigeonhole(holes: int):
    """holes+1 pigeons into ``holes`` holes; classic small UNSAT family."""
    pigeons = holes + 1

    def var(p, h):
        return p * holes + h + 1

    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p1 in range(pigeons):
            for p2 in range(p1 + 1, pigeons):
                clauses.append([-var(p1, h), -var(p2, h)])
    return pigeons * holes, clauses


@pytest.mark.parametrize("backend", BACKENDS)
class TestBackend:
    def test_trivial(self, backend):
        status, model = sat.solve(1, to_flat([[1]]), backend=backend)
        assert status == sat.SAT and model[0] is True
        status, _ = sat.solve(1, to_flat([[1], [-1]]), backend=backend)
        assert status == sat.UNSAT

    def test_against_brute_force(self, backend):
        rng = random.Random(101)
        for round_ in range(300):
            n = rng.randint(1, 6)
            clauses = random_cnf(rng, n, rng.randint(1, 14))
            expected = brute_force(n, clauses)
            status, model = sat.solve(n, to_flat(clauses), backend=backend)
            assert status == (sat.SAT if expected else sat.UNSAT), clauses
            if model is not None:
                for clause in clauses:
                    assert any(model[abs(l) - 1] == (l > 0) for l in clause)

    def test_pigeonhole_unsat(self, backend):
        n, clauses = pigeonhole(5)
        status, _ = sat.solve(n, to_flat(clauses), backend=backend)
        assert status == sat.UNSAT

    def test_larger_random_sat_models_check_out(self, backend):
        rng = random.Random(7)
        for _ in range(10):
            n = 60
            clauses = random_cnf(rng, n, 150, width=5)
            status, model = sat.solve(n, to_flat(clauses), backend=backend)
            if status == sat.SAT:
                for clause in clauses:
                    assert any(model[abs(l) - 1] == (l > 0) for l in clause)

    def test_deadline_reports_unknown(self, backend):
        n, clauses = pigeonhole(9)
        status, model = sat.solve(
            n, to_flat(clauses), deadline=time.monotonic() - 1.0, backend=backend
        )
        assert status in (sat.UNKNOWN, sat.UNSAT)
        # An already-expired deadline must come back quickly.
        start = time.monotonic()
        sat.solve(n, to_flat(clauses), deadline=time.monotonic() + 0.3, backend=backend)
        assert time.monotonic() - start < 30


@pytest.mark.skipif(not sat.has_compiled(), reason="compiled core not built")
class TestTwinAgreement:
    def test_verdicts_agree(self):
        rng = random.Random(33)
        for _ in range(200):
            n = rng.randint(1, 8)
            clauses = random_cnf(rng, n, rng.randint(1, 20))
            flat = to_flat(clauses)
            s1, _ = sat.solve(n, flat, backend="python")
            s2, _ = sat.solve(n, flat, backend="compiled")
            assert s1 == s2


class TestDimacs:
    def test_format(self):
        text = dimacs.dimacs_text(3, to_flat([[1, -2], [2, 3]]))
        lines = text.strip().splitlines()
        assert lines[0] == "p cnf 3 2"
        assert lines[1] == "1 -2 0"
        assert lines[2] == "2 3 0"

    def test_output_parsing(self):
        status, model = dimacs.parse_solver_output(
            "c comment\ns SATISFIABLE\nv 1 -2 3 0\n", 10, 3
        )
        assert status == sat.SAT
        assert model == [True, False, True]
        status, model = dimacs.parse_solver_output("s UNSATISFIABLE\n", 20, 3)
        assert status == sat.UNSAT and model is None
        status, _ = dimacs.parse_solver_output("", 1, 3)
        assert status == sat.UNKNOWN

    def test_external_solver_stub(self, tmp_path):
        # A fake solver that handles exactly our two probe files.
        script = tmp_path / "fakesat"
        script.write_text(
            "#!/usr/bin/env python3\n"
            "import sys\n"
            "text = open(sys.argv[1]).read()\n"
            "if 'p cnf 1 2' in text:\n"
            "    print('s UNSATISFIABLE')\n"
            "else:\n"
            "    print('s SATISFIABLE')\n"
            "    print('v 1 0')\n"
        )
        script.chmod(script.stat().st_mode | stat.S_IEXEC)
        status, model = sat.solve(1, to_flat([[1]]), backend=str(script))
        assert status == sat.SAT and model == [True]
        status, model = sat.solve(1, to_flat([[1], [-1]]), backend=str(script))
        assert status == sat.UNSAT
