import pytest
from hypothesis import given

from conftest import PRELUDE, md, term
from gen import terms
from lop.calculi import (
    InvalidRedexError,
    affine_check,
    bang_redexes,
    bang_step,
    cbn_redexes,
    cbn_step,
    cbv_nf_kind,
    cbv_redexes,
    cbv_step,
    head_redex,
    is_affine,
    is_head_nf,
    redexes,
    selector,
    step,
)
from lop.calculi.base import Redex
from lop.calculi.bang import is_surface_normal
from lop.parser import parse
from lop.propcheck.enumerate import enumerate_terms
from lop.terms import Var, is_value

EX11 = r"(\z. XOR z z) (T (+) F)"


def only(rs, **flags):
    return [r for r in rs if all(getattr(r, k) == v for k, v in flags.items())]


class TestCbvRedexes:
    def test_left_spine(self):
        rs = cbv_redexes(term("x (I I) (I I)"))
        assert [r.kind for r in rs] == ["beta_v", "beta_v"]
        assert all(r.surface for r in rs)
        assert [r.position for r in only(rs, left=True)] == [("fun", "arg")]

    def test_choice_under_lambda_is_frozen(self):
        assert cbv_redexes(term(r"\z. (x (+) y)")) == ()

    def test_example_with_opaque_xor(self):
        opaque = {k: v for k, v in PRELUDE.items() if k != "XOR"}
        t = parse(EX11, prelude=opaque)
        (r,) = cbv_redexes(t)
        assert (r.kind, r.position, r.surface, r.left) == ("oplus", ("arg",), True, True)

    def test_example_with_expanded_xor(self):
        rs = cbv_redexes(term(EX11))
        surface = only(rs, surface=True)
        assert [(r.kind, r.position, r.left) for r in surface] == [("oplus", ("arg",), True)]
        assert all(r.kind == "beta_v" for r in rs if not r.surface)

    def test_flags_are_consistent(self):
        for t in enumerate_terms("cbv", 6):
            for r in cbv_redexes(t):
                assert r.deep == (not r.surface)
                assert r.internal == (not r.left)
                assert not r.deep or r.internal
                assert r.kind != "oplus" or r.surface


class TestCbvStep:
    def test_beta(self):
        t = term(r"(\x.x)(\y.y)")
        (r,) = cbv_redexes(t)
        assert cbv_step(t, r) == md(("1", r"\y.y"))

    def test_choice(self):
        t = term("T (+) F")
        assert cbv_step(t, cbv_redexes(t)[0]) == md(("1/2", "T"), ("1/2", "F"))

    def test_example(self):
        t = term(EX11)
        (r,) = only(cbv_redexes(t), kind="oplus")
        assert cbv_step(t, r) == md(("1/2", r"(\z. XOR z z) T"), ("1/2", r"(\z. XOR z z) F"))

    def test_invalid_redex(self):
        with pytest.raises(InvalidRedexError):
            cbv_step(term("x y"), Redex((), "beta_v", True, True))


class TestCbvNormalForms:
    def test_examples(self):
        assert cbv_nf_kind(term(r"\x. I I")) == "surface_normal_only"
        assert cbv_nf_kind(term("T")) == "normal"
        assert cbv_nf_kind(term("D D")) == "reducible"

    def test_closed_term_collapse(self):
        for t in enumerate_terms("cbv", 8, ()):
            rs = cbv_redexes(t)
            no_surface = not only(rs, surface=True)
            no_left = not only(rs, left=True)
            assert no_surface == no_left == is_value(t), str(t)

    @given(terms("cbv"))
    def test_value_preservation(self, t):
        if not is_value(t):
            return
        for r in cbv_redexes(t):
            assert r.kind == "beta_v"
            ((p, w),) = cbv_step(t, r).entries
            assert p == 1 and is_value(w)


class TestBang:
    def test_affine_examples(self):
        assert affine_check(term(r"\x. x", "bang")) == (True, [])
        ok, why = affine_check(parse(r"\x. x x", "bang", check_affine=False))
        assert not ok and "2 occurrences" in why[0]
        ok, why = affine_check(parse(r"\x. !x", "bang", check_affine=False))
        assert not ok and "under '!'" in why[0]

    def test_bang_binders_unconstrained(self):
        assert is_affine(term(r"\!x. x !x", "bang"))

    def test_beta_under_lambda_is_surface(self):
        (r,) = bang_redexes(term(r"\x. (\y. y) (\y. y)", "bang"))
        assert (r.kind, r.surface, r.left, r.head) == ("beta_lin", True, None, None)

    def test_choice_under_bang_is_frozen(self):
        assert bang_redexes(term("!(x (+) y)", "bang")) == ()

    def test_bang_beta(self):
        rs = bang_redexes(term(r"(\!x. !x) !((\y. y) (\y. y))", "bang"))
        assert [(r.kind, r.position, r.surface) for r in rs] == [
            ("beta_bang", (), True),
            ("beta_lin", ("arg", "bang"), False),
        ]

    def test_steps(self):
        t = term(r"(\x. x) (y z)", "bang")
        assert bang_step(t, bang_redexes(t)[0]) == md(("1", "y z"), calculus="bang")
        t = term(r"(\!x. !x) !(\y. y)", "bang")
        assert bang_step(t, bang_redexes(t)[0]) == md(("1", r"!(\y. y)"), calculus="bang")
        t = term(r"\z. (x (+) y)", "bang")
        assert bang_step(t, bang_redexes(t)[0]) == md(("1/2", r"\z. x"), ("1/2", r"\z. y"), calculus="bang")

    @given(terms("bang"))
    def test_affine_preservation(self, t):
        for r in bang_redexes(t):
            assert all(is_affine(s) for s in bang_step(t, r).terms)

    @given(terms("bang"))
    def test_deep_step_shape(self, t):
        for r in bang_redexes(t):
            if r.deep:
                ((p, s),) = bang_step(t, r).entries
                assert p == 1
                assert is_surface_normal(t) == is_surface_normal(s)


class TestCbn:
    def test_head_versus_surface(self):
        rs = cbn_redexes(term(r"(\x. (\y. y) p) q", "cbn"))
        assert [(r.position, r.surface, r.head) for r in rs] == [
            ((), True, True),
            (("fun", "body"), True, False),
        ]

    def test_choice_in_argument_is_frozen(self):
        assert cbn_redexes(term("x (y (+) z)", "cbn")) == ()

    def test_choice_under_lambda(self):
        (r,) = cbn_redexes(term(r"\x. (y (+) z)", "cbn"))
        assert (r.kind, r.surface, r.head) == ("oplus", True, True)

    def test_steps(self):
        t = term(r"(\x. y) (D D)", "cbn")
        assert cbn_step(t, head_redex(t)) == md(("1", "y"), calculus="cbn")
        t = term(r"\x. (y (+) z)", "cbn")
        assert cbn_step(t, head_redex(t)) == md(("1/2", r"\x. y"), ("1/2", r"\x. z"), calculus="cbn")
        t = term(r"(\x. I (y (+) z)) I", "cbn")
        (inner,) = [r for r in cbn_redexes(t) if r.position == ("fun", "body")]
        assert cbn_step(t, inner) == md(("1", r"(\x. (y (+) z)) I"), calculus="cbn")

    def test_head_normal_forms(self):
        assert is_head_nf(term(r"\x. x (D D)", "cbn"))
        assert not is_head_nf(term(r"\x. (\y. y) z", "cbn"))
        assert is_head_nf(term("y (y (+) z)", "cbn"))

    def test_surface_normal_is_head_normal(self):
        strict = False
        for t in enumerate_terms("cbn", 7):
            rs = cbn_redexes(t)
            assert (not only(rs, surface=True)) == (not only(rs, head=True)), str(t)
            assert all(r.surface for r in only(rs, head=True))
            strict = strict or bool(only(rs, surface=True, head=False))
        assert strict

    def test_at_most_one_surface_choice(self):
        for t in enumerate_terms("cbn", 7):
            assert len(only(cbn_redexes(t), kind="oplus")) <= 1


class TestDispatch:
    def test_unknown_calculus(self):
        with pytest.raises(ValueError):
            redexes(Var("x"), "cbx")

    def test_selector_restrictions(self):
        with pytest.raises(ValueError):
            selector("cbv", "head")
        with pytest.raises(ValueError):
            selector("cbn", "left")
        assert selector("cbv", "left")(term("x (I I) (I I)")).position == ("fun", "arg")

    def test_step_checks_membership(self):
        with pytest.raises(InvalidRedexError):
            step(term(r"\z. (x (+) y)"), Redex(("body",), "oplus", True, True), "cbv")
