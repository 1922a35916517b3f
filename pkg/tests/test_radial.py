"""Exact radial algebra: construction, Laplacians, power reduction, and the
symbolic bubble PDE check against closed forms and finite differences."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polybubble.radial import (LaurentPoly, RadialFunction, RepresentationError,
                               bubble_constant, bubble_constant_product,
                               check_bubble_identity, critical_exponent,
                               laplacian, make_bubble, power_reduce,
                               radial_derivative)


def test_make_bubble_structure():
    b = make_bubble(3, 1)
    assert b.M == 1 and b.terms == {(0, 0): LaurentPoly.const(1)}
    b52 = make_bubble(5, 2)
    assert b52.M == 1 and list(b52.terms) == [(0, 0)]


def test_make_bubble_eval_at_zero():
    assert make_bubble(3, 1)(0.0, 1.0 / 3.0) == 1.0


def test_make_bubble_invalid_params():
    with pytest.raises(ValueError):
        make_bubble(2, 1)
    with pytest.raises(ValueError):
        make_bubble(5, 0)


def test_eval_examples():
    b = make_bubble(3, 1)
    assert b(1.0, 1.0 / 3.0) == pytest.approx((4.0 / 3.0) ** -0.5, rel=1e-14)
    assert b(1e8, 1.0 / 3.0) < 1e-7  # decay at infinity


def test_laplacian_of_r_squared():
    n = 5
    f = RadialFunction(n, 0, {(2, 0): LaurentPoly.const(1)})
    g = laplacian(f)
    # -Delta r^2 = -2n
    assert g.terms == {(0, 0): LaurentPoly.const(-2 * n)}


def test_laplacian_constant_is_zero():
    f = RadialFunction(4, 0, {(0, 0): LaurentPoly.const(1)})
    assert laplacian(f).is_zero()


def test_laplacian_closed_form_k1():
    # -Delta (1+ar^2)^{-(n-2)/2} = n(n-2) a (1+ar^2)^{-(n+2)/2}
    for n in (3, 5, 8):
        f = make_bubble(n, 1)
        g = power_reduce(laplacian(f))
        assert g.terms == {(0, 2): LaurentPoly.monomial(n * (n - 2), 1)}


def test_laplacian_rejects_odd_power():
    f = RadialFunction(3, 1, {(1, 0): LaurentPoly.const(1)})
    with pytest.raises(RepresentationError):
        laplacian(f)


def test_radial_derivative_examples():
    f = RadialFunction(3, 0, {(0, 0): LaurentPoly.const(1)})
    assert radial_derivative(f).is_zero()
    # d/dr (1+ar^2)^{-q/2} = -a q r (1+ar^2)^{-(q+2)/2}
    g = RadialFunction(3, 3, {(0, 0): LaurentPoly.const(1)})  # q = 3
    dg = radial_derivative(g)
    assert dg.terms == {(1, 1): LaurentPoly.monomial(-3, 1)}


def test_radial_derivative_bubble_at_one():
    b = make_bubble(3, 1)
    db = radial_derivative(b)
    a = 1.0 / 3.0
    exact = -(1.0 / 3.0) * (4.0 / 3.0) ** -1.5
    assert db(1.0, a) == pytest.approx(exact, rel=1e-14)
    # central finite difference oracle
    h = 1e-5
    fd = (b(1.0 + h, a) - b(1.0 - h, a)) / (2 * h)
    assert db(1.0, a) == pytest.approx(fd, abs=1e-10)


def test_power_reduce_defining_identity():
    # r^2 (1+ar^2)^{-1} = a^{-1} - a^{-1} (1+ar^2)^{-1}
    f = RadialFunction(3, 2, {(2, 0): LaurentPoly.const(1)})
    g = power_reduce(f)
    assert g.terms[(0, -1)] == LaurentPoly.monomial(1, -1)
    assert g.terms[(0, 0)] == LaurentPoly.monomial(-1, -1)


def test_power_reduce_idempotent():
    f = power_reduce(laplacian(make_bubble(5, 1)))
    assert power_reduce(f).terms == f.terms


def test_power_reduce_rejects_odd():
    f = RadialFunction(3, 1, {(1, 0): LaurentPoly.const(1)})
    with pytest.raises(RepresentationError):
        power_reduce(f)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3),
                          st.integers(-3, 3)), min_size=1, max_size=4),
       st.integers(0, 19))
def test_power_reduce_preserves_values(terms, pt_idx):
    """Property: evaluation is pointwise identical after reduction."""
    n = 5
    built = {}
    for (s, t, c) in terms:
        key = (2 * s, t)
        built[key] = built.get(key, LaurentPoly()) + LaurentPoly.const(c)
    f = RadialFunction(n, 2, built)
    g = power_reduce(f)
    rng = np.random.default_rng(pt_idx)
    r = rng.uniform(0.0, 3.0)
    a = rng.uniform(0.1, 2.0)
    assert g(r, a) == pytest.approx(f(r, a), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n,k,coef", [(3, 1, 3), (7, 1, 35), (5, 2, 105)])
def test_check_bubble_identity_examples(n, k, coef):
    res = check_bubble_identity(n, k)
    assert res.passed
    assert res.residual_terms == []
    assert res.leading_coefficient == LaurentPoly.monomial(coef, k)
    assert bubble_constant_product(n, k) == coef


def test_check_bubble_identity_high_precision_52():
    # numeric cross-check at a = 105^{-1/2}
    n, k = 5, 2
    a = 105.0 ** -0.5
    b = make_bubble(n, k)
    g = laplacian(laplacian(b))
    ts = critical_exponent(n, k)
    for r in (0.0, 0.7, 1.3, 4.0):
        assert g(r, a) == pytest.approx(b(r, a) ** (ts - 1), rel=1e-10)


def test_bubble_identity_full_range():
    for k in range(1, 5):
        for n in range(2 * k + 1, 13):
            assert check_bubble_identity(n, k).passed, (n, k)


def test_laplacian_fd_richardson_slope():
    """-Delta f agrees with a second-order FD Laplacian at O(h^2):
    Richardson slope >= 1.9 between h=1e-2 and h=1e-3."""
    n, k = 6, 2
    a = bubble_constant(n, k)
    f = make_bubble(n, k)
    g = laplacian(f)
    r0 = 0.8

    def fd_lap(h):
        # radial Laplacian: f'' + (n-1)/r f'
        fpp = (f(r0 + h, a) - 2 * f(r0, a) + f(r0 - h, a)) / h**2
        fp = (f(r0 + h, a) - f(r0 - h, a)) / (2 * h)
        return -(fpp + (n - 1) / r0 * fp)

    e1 = abs(fd_lap(1e-2) - g(r0, a))
    e2 = abs(fd_lap(1e-3) - g(r0, a))
    slope = math.log10(e1 / e2)
    assert slope >= 1.9


def test_serialization_roundtrip_and_format():
    g = power_reduce(laplacian(laplacian(make_bubble(9, 2))))
    text = g.to_text()
    assert ";" in text and "/" not in text.split("\n")[0]
    g2 = RadialFunction.from_text(text)
    assert g2.terms == g.terms and (g2.n, g2.M) == (g.n, g.M)
    # coefficient formatting: exact rationals num/den and a-powers
    lp = LaurentPoly({0: Fraction(1, 2), 1: Fraction(-3), -1: Fraction(2, 7)})
    assert LaurentPoly.from_str(lp.to_str()) == lp


def test_bubble_constant_values():
    assert bubble_constant(3, 1) == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert bubble_constant(5, 2) == pytest.approx(105.0 ** -0.5, rel=1e-15)
