"""Multilinear polynomial algebra: reduction, extension identity,
canonical form, serialization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submax import (
    BudgetExceededError,
    GeneralPolynomial,
    Monomial,
    MultilinearPolynomial,
    multilinearize,
)

from conftest import bernoulli_expectation, random_general_polynomial


def mp(n, *items):
    return MultilinearPolynomial(n, items)


class TestMultilinearize:
    def test_exponent_collapse(self):
        # 3*y1^2*y2 -> 3*y1*y2
        p = GeneralPolynomial(2, [(3.0, ((0, 2), (1, 1)))])
        assert multilinearize(p) == mp(2, (3.0, (0, 1)))

    def test_constant_identity(self):
        p = GeneralPolynomial(4, [(5.0, ())])
        assert multilinearize(p) == mp(4, (5.0, ()))

    def test_out_of_range_variable_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            GeneralPolynomial(2, [(1.0, ((5, 1),))])

    def test_agrees_on_binary_inputs(self, rng):
        for _ in range(20):
            p = random_general_polynomial(rng, n=6)
            q = multilinearize(p)
            for code in range(2**6):
                x = np.array([(code >> i) & 1 for i in range(6)], dtype=float)
                assert q.evaluate(x) == pytest.approx(
                    p.evaluate(x), abs=1e-12
                )

    def test_extension_equals_bernoulli_expectation(self, rng):
        # Expectation computed by explicit 2^8 enumeration with product
        # weights; the multilinearization must match at fractional y.
        for _ in range(5):
            p = random_general_polynomial(rng, n=8)
            q = multilinearize(p)
            y = rng.random(8)
            expected = bernoulli_expectation(p.evaluate, y)
            assert q.evaluate(y) == pytest.approx(expected, abs=1e-9)


class TestProductReduction:
    def test_idempotence(self):
        y1 = MultilinearPolynomial.variable(3, 0)
        assert y1 * y1 == y1

    def test_difference_of_idempotents(self):
        one = MultilinearPolynomial.constant(2, 1.0)
        y1 = MultilinearPolynomial.variable(2, 0)
        assert (one + y1) * (one - y1) == one - y1

    def test_matches_plain_product_on_binary(self, rng):
        for _ in range(10):
            a = multilinearize(random_general_polynomial(rng, n=6, max_terms=8))
            b = multilinearize(random_general_polynomial(rng, n=6, max_terms=8))
            ab = a * b
            for code in range(64):
                x = np.array([(code >> i) & 1 for i in range(6)], dtype=float)
                assert ab.evaluate(x) == pytest.approx(
                    a.evaluate(x) * b.evaluate(x), rel=1e-12, abs=1e-12
                )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            MultilinearPolynomial.variable(2, 0) * MultilinearPolynomial.variable(3, 0)
        with pytest.raises(ValueError, match="dimension mismatch"):
            MultilinearPolynomial.variable(2, 0) + MultilinearPolynomial.variable(3, 0)

    def test_budget_error(self):
        # (1+y0)(1+y1)...(1+y19) has 2^20 monomials; cap below that.
        p = MultilinearPolynomial.constant(20, 1.0)
        with pytest.raises(BudgetExceededError):
            for i in range(20):
                f = MultilinearPolynomial(20, [(1.0, ()), (1.0, (i,))])
                p = p.__mul__(f, budget=1000)


class TestAddScale:
    def test_merge(self):
        y1 = MultilinearPolynomial.variable(2, 0)
        assert y1 + y1 == mp(2, (2.0, (0,)))

    def test_scale_to_zero(self):
        p = mp(2, (1.0, (0, 1)))
        assert p.scale(0.0).is_zero

    def test_cancellation(self):
        y1 = MultilinearPolynomial.variable(2, 0)
        y2 = MultilinearPolynomial.variable(2, 1)
        assert (y1 + y2) - y2 == y1

    def test_add_zero_is_identity(self, rng):
        p = multilinearize(random_general_polynomial(rng, n=5))
        assert p + MultilinearPolynomial.zero(5) == p

    def test_tiny_coefficients_dropped(self):
        p = mp(2, (1e-16, (0,)))
        assert p.is_zero


class TestEvaluate:
    def test_product_point(self):
        p = mp(2, (1.0, (0, 1)))
        assert p.evaluate([0.5, 0.5]) == pytest.approx(0.25)

    def test_set_function_on_integral_inputs(self, rng):
        p = multilinearize(random_general_polynomial(rng, n=5))
        x = np.array([1, 0, 1, 1, 0], dtype=float)
        manual = sum(
            m.coefficient
            for m in p.terms
            if all(x[i] == 1 for i in m.support)
        )
        assert p.evaluate(x) == pytest.approx(manual, rel=1e-12, abs=1e-12)

    def test_range_error_strict(self):
        p = mp(1, (1.0, (0,)))
        with pytest.raises(ValueError, match="outside"):
            p.evaluate([1.5])
        assert p.evaluate([1.5], clamp=True) == pytest.approx(1.0)

    def test_dimension_error(self):
        p = mp(2, (1.0, (0,)))
        with pytest.raises(ValueError, match="shape"):
            p.evaluate([0.5])


class TestCoordinateDifference:
    def test_modular(self):
        p = MultilinearPolynomial.variable(3, 0)
        assert p.coordinate_difference(0, [0.9, 0.1, 0.4]) == pytest.approx(1.0)

    def test_bilinear(self):
        p = mp(2, (1.0, (0, 1)))
        assert p.coordinate_difference(0, [0.9, 0.3]) == pytest.approx(0.3)

    def test_matches_finite_difference(self, rng):
        # The extension is affine per coordinate, so a central finite
        # difference is exact up to roundoff.
        for _ in range(5):
            p = multilinearize(random_general_polynomial(rng, n=8))
            y = 0.2 + 0.6 * rng.random(8)
            h = 1e-6
            for i in range(8):
                up, dn = y.copy(), y.copy()
                up[i] += h
                dn[i] -= h
                fd = (p.evaluate(up) - p.evaluate(dn)) / (2 * h)
                assert p.coordinate_difference(i, y) == pytest.approx(
                    fd, abs=1e-5
                )

    def test_invariant_in_pinned_coordinate(self, rng):
        p = multilinearize(random_general_polynomial(rng, n=6))
        y = rng.random(6)
        base = p.coordinate_difference(2, y)
        y2 = y.copy()
        y2[2] = rng.random()
        assert abs(p.coordinate_difference(2, y2) - base) <= 1e-12

    def test_gradient_matches_per_coordinate(self, rng):
        p = multilinearize(random_general_polynomial(rng, n=7))
        y = rng.random(7)
        grad = p.gradient(y)
        for i in range(7):
            assert grad[i] == pytest.approx(
                p.coordinate_difference(i, y), rel=1e-10, abs=1e-12
            )

    def test_index_error(self):
        p = mp(2, (1.0, (0,)))
        with pytest.raises(ValueError, match="out of range"):
            p.coordinate_difference(2, [0.5, 0.5])


class TestSerialization:
    def test_round_trip(self, rng):
        p = multilinearize(random_general_polynomial(rng, n=6))
        q = MultilinearPolynomial.from_text(p.to_text(), 6)
        assert p == q

    def test_constant_line(self):
        p = mp(3, (2.5, ()), (1.0, (0, 2)))
        text = p.to_text()
        assert text.splitlines()[0] == "2.5:"
        assert text.splitlines()[1] == "1.0:0,2"

    def test_malformed_line(self):
        with pytest.raises(ValueError, match="malformed line 1"):
            MultilinearPolynomial.from_text("nope:0,1\n", 2)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_property_product_agrees_on_binary(data):
    n = data.draw(st.integers(2, 5))
    terms = st.lists(
        st.tuples(
            st.floats(-3, 3, allow_nan=False),
            st.sets(st.integers(0, n - 1), max_size=n).map(
                lambda s: tuple(sorted(s))
            ),
        ),
        max_size=6,
    )
    a = MultilinearPolynomial(n, data.draw(terms))
    b = MultilinearPolynomial(n, data.draw(terms))
    ab = a * b
    for code in range(2**n):
        x = np.array([(code >> i) & 1 for i in range(n)], dtype=float)
        assert ab.evaluate(x) == pytest.approx(
            a.evaluate(x) * b.evaluate(x), rel=1e-9, abs=1e-9
        )


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_property_monomials_canonical(data):
    n = data.draw(st.integers(1, 6))
    items = data.draw(
        st.lists(
            st.tuples(
                st.floats(-2, 2, allow_nan=False),
                st.sets(st.integers(0, n - 1), max_size=n).map(
                    lambda s: tuple(sorted(s))
                ),
            ),
            max_size=8,
        )
    )
    p = MultilinearPolynomial(n, items)
    supports = [m.support for m in p.terms]
    assert supports == sorted(supports)
    assert len(set(supports)) == len(supports)
    for m in p.terms:
        assert isinstance(m, Monomial)
        assert list(m.support) == sorted(set(m.support))
        assert abs(m.coefficient) >= 1e-15
