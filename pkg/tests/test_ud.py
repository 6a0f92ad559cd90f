import numpy as np
import pytest

from mbarnes.expr import Gamma, LinearForm, evaluate, expr_equal_numeric, lf, normalize, relabel
from mbarnes.text import parse_expr
from mbarnes.ud import (
    DParams,
    RegTriple,
    build_D,
    build_D_short,
    build_J,
    build_lhs_integrand,
    build_rhs_terms,
    lhs_factors,
    rhs_terms,
)
from oracles import EQ4_AT_COMPLEX_POINT, EQ4_AT_POINT, HEADLINE, J_AT_HEADLINE, RHS_HEADLINE

EQ4_TEXT = (
    "Gamma(-u) * Gamma(-v) * Gamma(1 + u + v + eps3) / (Gamma(1 + eps1) * Gamma(1 + eps2) * Gamma(1 + eps3)^2)"
    " * Gamma(-z2) * Gamma(-z3) * Gamma(1 + z2 + z3 + eps3) * Gamma(-u + eps1 + z2) * Gamma(-v + eps2 + z3)"
    " * Gamma(1 - z2 - z3 + u + v) / ((eps1 - z3) * (eps2 - z2))"
)


def test_reg_triple():
    reg = RegTriple()
    assert reg.eps1 + reg.eps2 + reg.eps3 == LinearForm.constant(0)
    assert reg.names == ("eps1", "eps2")
    with pytest.raises(ValueError):
        RegTriple(lf("eps1"), lf("eps1"))
    with pytest.raises(ValueError):
        RegTriple(lf("2*eps1"), lf("eps2"))


def test_build_D_at_unit_indices():
    e = build_D(DParams(lf("z2"), lf("z3"), 1, 1, 1))
    assert e == normalize(Gamma(lf("-z2"), 2) * Gamma(lf("-z3"), 2) * Gamma(lf("1 + z2 + z3"), 2))
    assert build_D_short(lf("u"), lf("v"), 0) == parse_expr("Gamma(-u)^2 * Gamma(-v)^2 * Gamma(1 + u + v)^2")


def test_first_display():
    reg = RegTriple()
    _, inner = lhs_factors(reg)
    expected = parse_expr(
        "Gamma(-z2) * Gamma(-z3) * Gamma(-z2 - (1 + eps1) - (1 + eps3) + 2) * Gamma(-z3 - (1 + eps2) - (1 + eps3) + 2)"
        " * Gamma(z2 + z3 + 1 + eps3) * Gamma(3 + eps1 + eps2 + eps3 - 2 + z2 + z3)"
        " / (Gamma(1 + eps1) * Gamma(1 + eps2) * Gamma(1 + eps3) * Gamma(4 - 3))"
    )
    assert build_D(inner) == expected


def test_second_display_keeps_the_cancelling_factor():
    outer, _ = lhs_factors()
    raw = build_D(outer, normalized=False)
    assert (lf("1 + z2 + z3"), -1) in normalize(raw, collapse=False).gammas


def test_lhs_integrand_is_the_transcribed_integrand():
    assert build_lhs_integrand() == parse_expr(EQ4_TEXT)


def test_lhs_integrand_against_oracle():
    e = build_lhs_integrand()
    p = {"u": -0.4, "v": -0.4, "z2": -0.2, "z3": -0.2, "eps1": 0.1, "eps2": 0.07}
    assert abs(evaluate(e, p) - EQ4_AT_POINT) / abs(EQ4_AT_POINT) < 1e-12
    p = dict(HEADLINE, z2=complex(-0.2, 1.3), z3=complex(-0.2, -0.7))
    assert abs(evaluate(e, p) - EQ4_AT_COMPLEX_POINT) / abs(EQ4_AT_COMPLEX_POINT) < 1e-12


def test_lhs_integrand_equals_product_of_unnormalized_Ds():
    outer, inner = lhs_factors()
    raw = build_D(outer, normalized=False) * build_D(inner, normalized=False)
    ok, witness = expr_equal_numeric(build_lhs_integrand(), raw, 50, 1e-10, rng=7)
    assert ok, witness


def test_equal_eps_keeps_the_integrand_regular():
    e = build_lhs_integrand()
    val = evaluate(e, {"u": -0.4, "v": -0.3, "z2": -0.2 + 0.5j, "z3": -0.25, "eps1": 0.05, "eps2": 0.05})
    assert np.isfinite(val)


def test_J():
    J = build_J()
    assert evaluate(J, {"eps1": 0, "eps2": 0}) == pytest.approx(1, abs=1e-15)
    assert len(J.gammas) == 6
    val = evaluate(J, {"eps1": 0.1, "eps2": 0.07})
    assert abs(val.imag) < 1e-15 and val.real > 0
    assert abs(val - J_AT_HEADLINE) < 1e-12


def test_rhs_terms_match_displays():
    t6, t5, t7 = rhs_terms()
    J = build_J()
    d5 = parse_expr("Gamma(-u) * Gamma(-v) * Gamma(-eps3 - u) * Gamma(-eps3 - v) * Gamma(1 + eps3 + u + v)^2"
                    " / (Gamma(1 - eps3) * Gamma(1 + eps3) * eps1 * eps2)")
    d6 = parse_expr("Gamma(-u) * Gamma(eps2 - v) * Gamma(eps1 - u) * Gamma(-eps3 - v) * Gamma(1 + eps3 + u + v)^2"
                    " / (Gamma(1 - eps1) * Gamma(1 + eps1) * eps2 * eps3)")
    d7 = parse_expr("Gamma(eps1 - u) * Gamma(-v) * Gamma(-eps3 - u) * Gamma(eps2 - v) * Gamma(1 + eps3 + u + v)^2"
                    " / (Gamma(1 - eps2) * Gamma(1 + eps2) * eps1 * eps3)")
    assert t5 == normalize(J * d5)
    assert t6 == normalize(J * d6)
    assert t7 == normalize(J * d7)


def test_rhs_against_oracle():
    val = evaluate(build_rhs_terms(), HEADLINE)
    assert abs(val - RHS_HEADLINE) / abs(RHS_HEADLINE) < 1e-12


def test_rhs_swap_symmetry():
    t6, t5, t7 = rhs_terms()
    swap = {"u": "v", "eps1": "eps2"}
    assert relabel(t6, swap) == t7
    assert relabel(t5, swap) == t5
    assert relabel(build_rhs_terms(), swap) == build_rhs_terms()


def test_symbolic_dimension():
    d = LinearForm.symbol("d")
    e = build_D(DParams(lf("u"), lf("v"), 1, 1, 1, d))
    at4 = evaluate(e, {"u": -0.3, "v": -0.2, "d": 4})
    assert at4 == pytest.approx(evaluate(build_D_short(lf("u"), lf("v"), 0), {"u": -0.3, "v": -0.2}), rel=1e-13)
