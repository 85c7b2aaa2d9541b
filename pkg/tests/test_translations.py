import dataclasses
import itertools

import pytest

from conftest import md, term
from lop import translations
from lop.calculi import redexes
from lop.propcheck.enumerate import enumerate_terms
from lop.terms import App, Choice, Var, alpha_eq, is_value
from lop.translations import (
    ReservedNameError,
    check_simulation,
    translate_bang,
    translate_cbn,
    translate_cbv,
    translate_md,
)

Z = Var("__z")


def reserved(text, calculus="cbv"):
    return term(text, calculus, allow_reserved=True)


class TestCbv:
    def test_simple(self):
        assert translate_cbv(term("x (+) y"), "simple") == App(App(Z, Var("x")), Var("y"))

    def test_surface_preserving(self):
        assert translate_cbv(term("x (+) y"), "surface-preserving") == reserved(r"__z (\__w. x) (\__w. y)")

    def test_choice_free_terms_fixed(self):
        assert translate_cbv(term(r"\x. x")) == term(r"\x. x")

    def test_reserved_names_rejected(self):
        with pytest.raises(ReservedNameError):
            translate_cbv(reserved("__z x"))
        with pytest.raises(ValueError):
            translate_cbv(term("x"), "thunked")

    @pytest.mark.parametrize("variant", ["simple", "surface-preserving"])
    def test_injective_and_value_preserving(self, variant):
        ts = enumerate_terms("cbv", 6)
        images = {}
        for t in ts:
            image = translate_cbv(t, variant)
            assert is_value(t) == is_value(image)
            assert image not in images, f"{t} and {images.get(image)}"
            images[image] = t
            assert not any(isinstance(s, Choice) for s in _subterms(image))


class TestBang:
    def test_examples(self):
        assert translate_bang(term("x (+) y", "bang")) == reserved("__z !x !y", "bang")
        assert translate_bang(term(r"\!x. !x", "bang")) == term(r"\!x. !x", "bang")
        assert translate_bang(term("(x (+) y) (+) w", "bang")) == reserved("__z !(__z !x !y) !w", "bang")

    def test_injective(self):
        ts = enumerate_terms("bang", 5)
        assert len({translate_bang(t) for t in ts}) == len(ts)


class TestCbn:
    def test_examples(self):
        assert translate_cbn(term(r"\x. x", "cbn")) == term(r"\!x. x", "bang")
        assert translate_cbn(term(r"(\x. x) y", "cbn")) == term(r"(\!x. x) !y", "bang")
        assert translate_cbn(term(r"\x. (y (+) z)", "cbn")) == term(r"\!x. (y (+) z)", "bang")

    def test_injective(self):
        ts = enumerate_terms("cbn", 6)
        assert len({translate_cbn(t) for t in ts}) == len(ts)

    def test_multidist(self):
        m = md(("1/2", r"\x. x"), ("1/2", "y"), calculus="cbn")
        assert translate_md(m, translate_cbn) == md(("1/2", r"\!x. x"), ("1/2", "y"), calculus="bang")


class TestSimulation:
    def test_beta(self):
        r = check_simulation(term(r"(\x. x) (\y. y)"), "cbv-simple")
        assert r.passed and r.checked == 2

    def test_cbn_surface_flags(self):
        assert check_simulation(term(r"\x. I I", "cbn"), "cbn").passed

    def test_cbn_frozen_choice(self):
        t = term("x (y (+) z)", "cbn")
        assert redexes(t, "cbn") == ()
        assert redexes(translate_cbn(t), "bang") == ()
        assert check_simulation(t, "cbn").passed

    @pytest.mark.parametrize("which", translations.SIMULATIONS)
    def test_small_universe(self, which):
        calc = translations.source_calculus(which)
        bad = [r for t in enumerate_terms(calc, 6) if not (r := check_simulation(t, which, steps=2)).passed]
        assert not bad, bad[0].to_json()

    def test_detects_a_broken_translation(self, monkeypatch):
        def swapped(t):
            match t:
                case Choice(a, b):
                    return App(App(Z, swapped(b)), swapped(a))
                case App(a, b):
                    return App(swapped(a), swapped(b))
                case _:
                    return translate_cbv(t)

        broken = dataclasses.replace(translations._SIMS["cbv-simple"], translate=swapped)
        monkeypatch.setitem(translations._SIMS, "cbv-simple", broken)
        report = check_simulation(term(r"((\x. x) y) (+) z"), "cbv-simple")
        assert not report.passed and report.failures


def _subterms(t):
    from lop.terms import subterms

    return [s for _, s in subterms(t)]


def test_alpha_stable():
    for a, b in itertools.combinations([term(r"\x. x (+) x"), term(r"\y. y (+) y")], 2):
        assert alpha_eq(translate_cbv(a), translate_cbv(b))
