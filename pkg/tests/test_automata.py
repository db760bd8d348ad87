import json
import random
import subprocess
import sys

import pytest

import gens
from promptsynth.automata import (
    BuchiAutomaton,
    FormulaError,
    lasso_membership,
    ltl_to_nba,
    spec_to_ucw,
    ucw_accepts,
)
from promptsynth.formulas import (
    Atom,
    Lasso,
    PromptF,
    TRUE,
    eval_on_lasso,
    negate,
    parse,
)


def loop(*vals) -> Lasso:
    return Lasso.make((), vals)


class TestTranslationBasics:
    def test_true_accepts_everything(self):
        aut = ltl_to_nba(TRUE)
        rng = random.Random(1)
        for _ in range(20):
            assert lasso_membership(aut, gens.random_lasso(rng, ["a", "b"]))

    def test_atom(self):
        aut = ltl_to_nba(Atom("q"))
        assert lasso_membership(aut, loop({"q"}))
        assert not lasso_membership(aut, loop(set()))

    def test_gf(self):
        aut = ltl_to_nba(parse("G F q"))
        assert lasso_membership(aut, loop(set(), {"q"}))
        assert not lasso_membership(aut, Lasso.make([{"q"}], [set()]))

    def test_prompt_rejected(self):
        with pytest.raises(FormulaError):
            ltl_to_nba(PromptF(Atom("q")))

    def test_state_bound(self):
        rng = random.Random(2)
        for _ in range(50):
            f = gens.random_formula(rng, ["a", "b"], 8)
            aut = ltl_to_nba(f)
            assert aut.n_states <= 2 ** 10


class TestLanguageAgainstEvaluator:
    def test_sampled_membership(self):
        rng = random.Random(17)
        count = 0
        while count < 1000:
            f = gens.random_formula(rng, ["a", "b"], 8)
            aut = ltl_to_nba(f)
            for _ in range(5):
                w = gens.random_lasso(rng, ["a", "b"], max_prefix=6, max_loop=6)
                assert lasso_membership(aut, w) == eval_on_lasso(f, w)
                count += 1

    def test_ucw_complement_coherence(self):
        rng = random.Random(19)
        count = 0
        while count < 600:
            f = gens.random_formula(rng, ["a", "b"], 8)
            ucw = spec_to_ucw(f)
            nba_neg = ltl_to_nba(negate(f))
            for _ in range(3):
                w = gens.random_lasso(rng, ["a", "b"], max_prefix=5, max_loop=5)
                expected = eval_on_lasso(f, w)
                assert ucw_accepts(ucw, w) == expected
                assert lasso_membership(nba_neg, w) == (not expected)
                count += 1


class TestUcw:
    def test_g_q_rejects_any_gap(self):
        ucw = spec_to_ucw(parse("G q"))
        assert ucw.mode == "ucw"
        assert ucw_accepts(ucw, loop({"q"}))
        assert not ucw_accepts(ucw, Lasso.make([{"q"}, set()], [{"q"}]))

    def test_f_q_rejects_empty_word(self):
        ucw = spec_to_ucw(parse("F q"))
        assert not ucw_accepts(ucw, loop(set()))

    def test_mode_guards(self):
        ucw = spec_to_ucw(parse("G q"))
        with pytest.raises(FormulaError):
            lasso_membership(ucw, loop({"q"}))
        with pytest.raises(FormulaError):
            ucw.accepting
        assert ucw.rejecting == ucw.as_nba().accepting


class TestDeterminism:
    def test_same_formula_same_structure(self):
        f = parse("G (q1 -> F p1) & G (!p1 | !p2)")
        a = ltl_to_nba(f)
        b = ltl_to_nba(f)
        assert a == b
        assert a.to_json() == b.to_json()

    def test_stable_across_hash_seeds(self):
        code = (
            "from promptsynth.automata import ltl_to_nba\n"
            "from promptsynth.formulas import parse\n"
            "print(ltl_to_nba(parse('G (q1 -> F p1) & G (q2 -> F p2) "
            "& G (!p1 | !p2)')).to_json())\n"
        )
        outs = set()
        for seed in ("0", "1", "7771"):
            r = subprocess.run(
                [sys.executable, "-c", code],
                capture_output=True,
                text=True,
                env={"PYTHONHASHSEED": seed, "PATH": "/usr/bin:/bin:/usr/local/bin"},
            )
            assert r.returncode == 0, r.stderr
            outs.add(r.stdout)
        assert len(outs) == 1


class TestDump:
    def test_json_fields(self):
        aut = ltl_to_nba(parse("F q"))
        doc = json.loads(aut.to_json())
        assert doc["mode"] == "nba"
        assert doc["states"] == aut.n_states
        assert all(set(e) == {"from", "guard", "to"} for e in doc["edges"])

    def test_undeclared_proposition_check(self):
        aut = ltl_to_nba(parse("F q"))
        with pytest.raises(FormulaError):
            lasso_membership(aut, loop({"q"}), declared=["a"])
        assert lasso_membership(aut, loop({"q"}), declared=["q"])
