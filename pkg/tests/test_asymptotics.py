from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import md, term
from gen import terms
from lop.asymptotics import (
    Classifier,
    ObservationSet,
    Strategy,
    Trace,
    classify_observation,
    compare_limits,
    evaluate_limit,
    valuable_mass,
)
from lop.multidist import MultiDist

P = r"(\x. (x x (+) T))"
Q = r"(\x. (x x (+) (T (+) F)))"
N = r"(\x. (x x) (+) (T (+) D D))"
OMEGA3 = "(W3 W3)"

VUB = ObservationSet("values-upto-beta", "cbv")


def run(text, strategy="full-surface", obs=VUB, calculus="cbv", **kw):
    return evaluate_limit(md(("1", text), calculus=calculus), Strategy.parse(strategy, calculus), obs, **kw)


class TestStrategy:
    def test_parse(self):
        assert Strategy.parse("random(5)", "cbv") == Strategy("random", "cbv", 5)
        assert Strategy.parse("random:7", "cbn").label == "random(7)"

    def test_restricted_classes(self):
        with pytest.raises(ValueError):
            Strategy("full-head", "cbv")
        with pytest.raises(ValueError):
            Strategy("full-left", "bang")

    def test_leftmost_any_reduces_one_entry(self):
        m = md(("1/2", "I I"), ("1/2", "I I"))
        choice = Strategy("leftmost-any", "cbv").chooser()(m)
        assert choice[0] is not None and choice[1] is None

    def test_random_is_reproducible(self):
        a, _ = run(N, "random(3)", max_steps=40)
        b, _ = run(N, "random(3)", max_steps=40)
        assert a == b


class TestClassify:
    def test_value(self):
        assert classify_observation(term("T"), VUB) == classify_observation(term(r"\a b. a"), VUB)

    def test_beta_equal_divergent_values(self):
        c = Classifier(VUB)
        a = c(term(rf"\x. {OMEGA3} W3"))
        b = c(term(rf"\x. {OMEGA3}"))
        assert a is not None and a == b

    def test_choice_is_not_observed(self):
        assert classify_observation(term("T (+) F"), VUB) is None

    def test_syntactic_sets(self):
        assert classify_observation(term("x"), ObservationSet("values", "cbv")) == "values"
        hnf = ObservationSet("hnf", "cbn")
        assert classify_observation(term(r"\x. x (D D)", "cbn"), hnf) == "hnf"
        assert classify_observation(term(r"(\x. x) y", "cbn"), hnf) is None

    def test_singletons(self):
        obs = ObservationSet("normal-form-singletons", "cbv")
        assert classify_observation(term(r"\x. x"), obs) == classify_observation(term(r"\y. y"), obs)
        assert classify_observation(term("T"), obs) != classify_observation(term("F"), obs)

    def test_mismatched_calculus(self):
        with pytest.raises(ValueError):
            ObservationSet("hnf", "cbv")


class TestEvaluate:
    def test_pp_mass_after_odd_steps(self):
        for n in range(1, 11):
            res, _ = run(f"{P} {P}", max_steps=2 * n + 1, epsilon=Fraction(0))
            assert res.mass_of(term("T")) == 1 - Fraction(1, 2**n)

    def test_pp_converges(self):
        res, _ = run(f"{P} {P}", epsilon=Fraction(1, 1024))
        assert res.converged and res.steps <= 21
        assert res.mass_of(term("T")) >= Fraction(1023, 1024)
        assert res.observed_mass + res.residual == 1

    def test_qq(self):
        res, _ = run(f"{Q} {Q}", max_steps=50)
        for b in ("T", "F"):
            assert res.mass_of(term(b)) >= Fraction(1, 2) - Fraction(1, 1024)
            assert res.mass_of(term(b)) <= Fraction(1, 2)

    def test_nn_is_half_valuable(self):
        res, _ = run(f"{N} {N}", max_steps=200, compact=True)
        assert not res.converged
        assert abs(res.mass_of(term("T")) - Fraction(1, 2)) <= Fraction(1, 1024)
        assert abs(res.residual - Fraction(1, 2)) <= Fraction(1, 1024)

    def test_stops_when_all_normal(self):
        res, trace = run("x (I I)", "full-any", ObservationSet("normal-forms", "cbv"))
        assert res.converged and res.steps == 1 and len(trace) == 1

    def test_divergence(self):
        res, _ = run("D D", "full-left", ObservationSet("values", "cbv"), max_steps=30)
        assert not res.converged and res.residual == 1 and res.steps == 30

    def test_trace_replays(self):
        _, trace = run(f"{Q} {Q}", max_steps=12)
        trace.replay()
        again = Trace.from_json(trace.to_json())
        assert again.states == trace.states
        again.replay()

    def test_compact_trace_replays(self):
        _, trace = run(f"{N} {N}", max_steps=12, compact=True)
        Trace.from_json(trace.to_json()).replay()

    def test_strategy_calculus_mismatch(self):
        with pytest.raises(ValueError):
            evaluate_limit(md(("1", "x")), Strategy("full-surface", "cbn"), VUB)

    def test_deep_steps_keep_classes(self):
        res, _ = run(r"(\x. I I) (T (+) F)", "full-any")
        assert res.converged and not res.warnings

    def test_json(self):
        res, _ = run(f"{P} {P}", epsilon=Fraction(1, 1024))
        data = res.to_json()
        assert data["classes"][0] == {"repr": r"\x. \y. x", "mass": "1023/1024", "resolved": True}
        assert data["residual"] == "1/1024" and data["converged"] is True


@settings(max_examples=40, deadline=None)
@given(st.lists(terms("cbv", 8), min_size=1, max_size=3), st.integers(0, 1000))
def test_class_masses_never_decrease(ts, seed):
    m = MultiDist(tuple((Fraction(1, 4), t) for t in ts))
    for obs in ("values-upto-beta", "normal-forms"):
        res, trace = evaluate_limit(m, Strategy("random", "cbv", seed), ObservationSet(obs, "cbv"), 15)
        assert not [w for w in res.warnings if "decreased" in w]
        for a, b in zip(trace.observed, trace.observed[1:]):
            assert a <= b


class TestValuable:
    def test_examples(self):
        s = Strategy("full-surface", "cbv")
        assert valuable_mass(md(("1", "T")), s) == 1
        assert valuable_mass(md(("1", "D D")), s, max_steps=50) == 0
        for n in (1, 4, 7):
            assert valuable_mass(md(("1", f"{P} {P}")), s, max_steps=2 * n + 1, epsilon=Fraction(0)) == 1 - Fraction(1, 2**n)


class TestCompare:
    def test_surface_and_left_agree(self):
        a, _ = run(f"{Q} {Q}", "full-surface", max_steps=30, epsilon=Fraction(0))
        b, _ = run(f"{Q} {Q}", "full-left", max_steps=30, epsilon=Fraction(0))
        assert compare_limits(a, b).verdict == "equal-within"

    def test_more_fuel_is_better(self):
        a, _ = run(f"{P} {P}", max_steps=5)
        b, _ = run(f"{P} {P}", max_steps=21)
        c = compare_limits(a, b)
        assert c.verdict == "a-below-b" and c.genuine == ()

    def test_naive_outcomes_incomparable(self):
        a, _ = evaluate_limit(md(("1", "F")), Strategy("full-surface", "cbv"), VUB)
        b, _ = evaluate_limit(md(("1/2", "T"), ("1/2", "F")), Strategy("full-surface", "cbv"), VUB)
        c = compare_limits(a, b)
        assert c.verdict == "incomparable"
        assert set(c.genuine) == {r"\x. \y. x", r"\x. \y. y"}

    def test_observation_mismatch(self):
        a, _ = run("T")
        b, _ = run("T", obs=ObservationSet("values", "cbv"))
        with pytest.raises(ValueError):
            compare_limits(a, b)
