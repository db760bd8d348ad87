import random

import pytest

import gens
from promptsynth.formulas import (
    And,
    Atom,
    FALSE,
    FormulaError,
    Lasso,
    NotAtom,
    Next,
    Or,
    ParseError,
    PromptF,
    PromptNegationError,
    PropPartition,
    Release,
    TRUE,
    Until,
    arbiter_formula,
    boundedness_formula,
    eval_on_lasso,
    eventually,
    has_prompt,
    lasso_to_text,
    parse,
    parse_lasso,
    propositions,
    relativize,
    size,
    to_text,
    unfold_prompt,
)


def loop(*vals) -> Lasso:
    return Lasso.make((), vals)


class TestParse:
    def test_shorthand_expansion(self):
        f = parse("G (q -> Fp p)")
        assert f == Release(FALSE, Or(NotAtom("q"), PromptF(Atom("p"))))

    def test_negated_prompt_rejected(self):
        with pytest.raises(PromptNegationError):
            parse("!(Fp q)")

    def test_syntax_error_position(self):
        with pytest.raises(ParseError) as err:
            parse("q1 & | p1")
        assert err.value.position == 5

    def test_precedence(self):
        assert parse("a & b | c") == Or(And(Atom("a"), Atom("b")), Atom("c"))
        assert parse("X a U b") == Until(Next(Atom("a")), Atom("b"))
        assert parse("a U b R c") == Until(Atom("a"), Release(Atom("b"), Atom("c")))
        assert parse("a -> b -> c") == Or(
            NotAtom("a"), Or(NotAtom("b"), Atom("c"))
        )

    def test_negation_pushed_inward(self):
        assert parse("!(a U b)") == Release(NotAtom("a"), NotAtom("b"))
        assert parse("!(a & X b)") == Or(NotAtom("a"), Next(NotAtom("b")))
        assert parse("!!a") == Atom("a")
        assert parse("!true") == FALSE

    def test_keyword_greedy_lexing(self):
        assert parse("Fp1") == Atom("Fp1")
        assert parse("Fp p1") == PromptF(Atom("p1"))

    def test_roundtrip_random(self):
        rng = random.Random(7)
        for _ in range(300):
            f = gens.random_formula(rng, ["a", "b", "c"], 9, allow_prompt=True)
            assert parse(to_text(f)) == f


class TestSize:
    def test_examples(self):
        assert size(PromptF(Atom("q"))) == 2
        assert size(And(Atom("q"), Atom("q"))) == 2
        assert size(Atom("q")) == 1

    def test_against_enumerator(self):
        rng = random.Random(11)
        for _ in range(200):
            f = gens.random_formula(rng, ["a", "b"], 10, allow_prompt=True)
            assert size(f) == len(gens.enumerate_subtrees(f))


class TestRelativize:
    def test_single_prompt(self):
        f = relativize(PromptF(Atom("q")), "p")
        p, np, q = Atom("p"), NotAtom("p"), Atom("q")
        assert f == And(
            Or(np, Until(p, Until(np, q))),
            Or(p, Until(np, Until(p, q))),
        )

    def test_pure_ltl_unchanged(self):
        g = parse("G q")
        assert relativize(g, "p") == g

    def test_nested_occurrence(self):
        f = parse("G (!q | Fp s)")
        expected = Release(
            FALSE,
            Or(NotAtom("q"), relativize(PromptF(Atom("s")), "p")),
        )
        assert relativize(f, "p") == expected

    def test_color_collision_rejected(self):
        with pytest.raises(FormulaError):
            relativize(parse("Fp p"), "p")

    def test_no_prompt_left_and_linear_size(self):
        rng = random.Random(23)
        for _ in range(200):
            f = gens.random_formula(rng, ["a", "b"], 10, allow_prompt=True)
            r = relativize(f, "c0")
            assert not has_prompt(r)
            assert size(r) <= 10 * size(f) + 10


class TestBoundedness:
    def test_k1_shape(self):
        p, np = Atom("p"), NotAtom("p")
        assert boundedness_formula(1, "p") == Release(
            FALSE, Or(And(p, Next(np)), And(np, Next(p)))
        )

    def test_rejects_zero(self):
        with pytest.raises(FormulaError):
            boundedness_formula(0, "p")

    def test_block_lengths(self):
        w = loop({"p"}, {"p"}, set())
        assert eval_on_lasso(boundedness_formula(2, "p"), w)
        assert not eval_on_lasso(boundedness_formula(1, "p"), w)

    def test_eventually_constant_color_fails_all_k(self):
        w = Lasso.make([{"p"}, set()], [set()])
        for k in range(1, 5):
            assert not eval_on_lasso(boundedness_formula(k, "p"), w)

    def test_linear_size(self):
        for k in range(1, 12):
            assert size(boundedness_formula(k, "p")) <= 8 * k + 8

    def test_matches_block_scanner(self):
        rng = random.Random(5)
        for _ in range(400):
            w = gens.random_lasso(rng, ["p", "a"], max_prefix=4, max_loop=5)
            for k in (1, 2, 3):
                expected = gens.is_k_bounded(w, "p", k)
                assert eval_on_lasso(boundedness_formula(k, "p"), w) == expected


class TestUnfold:
    def test_examples(self):
        fp = PromptF(Atom("q"))
        assert unfold_prompt(fp, 0) == Atom("q")
        q = Atom("q")
        assert unfold_prompt(fp, 2) == Or(q, Or(Next(q), Next(Next(q))))

    def test_agrees_with_eval(self):
        rng = random.Random(13)
        for _ in range(1000):
            f = gens.random_formula(rng, ["a", "b"], 8, allow_prompt=True)
            w = gens.random_lasso(rng, ["a", "b"])
            k = rng.randint(0, 8)
            assert eval_on_lasso(unfold_prompt(f, k), w) == eval_on_lasso(f, w, k)


class TestEval:
    def test_basics(self):
        assert eval_on_lasso(parse("G q"), loop({"q"}))
        assert eval_on_lasso(PromptF(Atom("q")), loop(set(), {"q"}), k=1)
        assert not eval_on_lasso(PromptF(Atom("q")), loop(set(), {"q"}), k=0)

    def test_psi_block_exactly_three(self):
        w = loop({"p"}, {"p"}, {"p"}, set(), set(), set())
        assert eval_on_lasso(boundedness_formula(3, "p"), w)
        assert not eval_on_lasso(boundedness_formula(2, "p"), w)

    def test_missing_bound_raises(self):
        with pytest.raises(FormulaError):
            eval_on_lasso(PromptF(Atom("q")), loop({"q"}))

    def test_monotone_in_k(self):
        rng = random.Random(3)
        for _ in range(300):
            f = gens.random_formula(rng, ["a", "b"], 7, allow_prompt=True)
            w = gens.random_lasso(rng, ["a", "b"])
            k = rng.randint(0, 5)
            if eval_on_lasso(f, w, k):
                for bigger in (k + 1, k + 3):
                    assert eval_on_lasso(f, w, bigger)

    def test_until_release_on_prefix_and_loop(self):
        w = Lasso.make([{"a"}, {"a"}], [{"b"}])
        assert eval_on_lasso(parse("a U b"), w)
        assert eval_on_lasso(parse("b R (a | b)"), w)
        assert not eval_on_lasso(parse("a U c"), w)


class TestAlternatingColorLemma:
    def test_spaced_colorings_satisfy_relativization(self):
        rng = random.Random(31)
        checked = 0
        while checked < 500:
            f = gens.random_formula(rng, ["a", "b"], 7, allow_prompt=True)
            w = gens.random_lasso(rng, ["a", "b"])
            k = rng.randint(1, 4)
            if not eval_on_lasso(f, w, k):
                continue
            checked += 1
            rel = relativize(f, "c0")
            for start_on in (True, False):
                for block in (k, k + 1, 2 * k):
                    wc = gens.stamp_spaced_coloring(w, "c0", block, start_on)
                    assert gens.is_k_spaced(wc, "c0", k)
                    assert eval_on_lasso(rel, wc)

    def test_bounded_relativized_implies_double_bound(self):
        rng = random.Random(37)
        checked = 0
        while checked < 500:
            f = gens.random_formula(rng, ["a", "b"], 7, allow_prompt=True)
            w = gens.random_lasso(rng, ["a", "b"])
            k = rng.randint(1, 4)
            wc = gens.random_bounded_coloring(rng, w, "c0", k)
            rel = relativize(f, "c0")
            if not eval_on_lasso(rel, wc):
                continue
            checked += 1
            assert eval_on_lasso(f, wc.drop("c0"), 2 * k)


class TestArbiter:
    def test_single_plain_resource(self):
        assert arbiter_formula(1, 0) == Release(
            FALSE, Or(NotAtom("q1"), eventually(Atom("p1")))
        )

    def test_two_one(self):
        f = arbiter_formula(2, 1)
        g = parse("G (q1 -> Fp p1) & G (q2 -> F p2) & G (!p1 | !p2)")
        assert f == g

    def test_no_prompt_without_prompt_resources(self):
        for r in range(1, 5):
            assert not has_prompt(arbiter_formula(r, 0))

    def test_propositions(self):
        f = arbiter_formula(3, 2)
        assert propositions(f) == {"q1", "q2", "q3", "p1", "p2", "p3"}

    def test_errors(self):
        with pytest.raises(FormulaError):
            arbiter_formula(2, 3)
        with pytest.raises(FormulaError):
            arbiter_formula(0, 0)


class TestPartition:
    def test_validation(self):
        with pytest.raises(FormulaError):
            PropPartition(("a",), ("a",))
        with pytest.raises(FormulaError):
            PropPartition(("p",), ("o",))
        part = PropPartition(("i1",), ("o1",), color="c")
        assert part.outputs_with_color() == ("o1", "c")


class TestLassoText:
    def test_roundtrip(self):
        w = Lasso.make([{"q1"}, set()], [{"p1", "q2"}])
        assert parse_lasso(lasso_to_text(w)) == w

    def test_parse(self):
        w = parse_lasso("{a} , {} ; {a b}")
        assert w == Lasso.make([{"a"}, set()], [{"a", "b"}])
        with pytest.raises(FormulaError):
            parse_lasso("{a}")
        with pytest.raises(FormulaError):
            parse_lasso("{a} ; ")
