"""Multilinear polynomials in the complement-product form.

A ``ComplementPolynomial`` stores terms ``coeff * prod_{i in A}(1 - y_i)``
plus a free constant.  Coverage-style objectives (unions of groups,
telescoping max-coverage, cache miss products) are naturally sparse in
this form, and it is closed under multilinear-reducing products: since
``(1 - x)**k == (1 - x)`` on binary x, term products merge supports by
set union exactly like standard monomials do.

This makes degree-L compositions of the scalar link with an inner
coverage polynomial compact even when the expanded monomial form would
have billions of terms, while representing the very same multilinear
function: ``evaluate`` and ``gradient`` agree with the expanded
``MultilinearPolynomial`` up to float rounding (see ``to_multilinear``).
"""

import numpy as np

from ._kernels import poly_grad, poly_value
from .polynomials import (
    COEFF_EPS,
    BudgetExceededError,
    MultilinearPolynomial,
    _canonical,
    _check_support,
)


class ComplementPolynomial:
    """constant + sum of coeff * prod_{i in A}(1 - y_i), canonical merged."""

    __slots__ = ("n", "constant", "_supports", "_coeffs", "_arrays")

    def __init__(self, n, constant=0.0, items=(), _canonical_parts=None):
        self.n = int(n)
        constant = float(constant)
        if _canonical_parts is not None:
            supports, coeffs = _canonical_parts
        else:
            checked = []
            for coeff, support in items:
                support = tuple(int(i) for i in support)
                _check_support(support, self.n)
                checked.append((float(coeff), support))
            supports, coeffs = _canonical(self.n, checked)
        # Fold empty-support terms into the constant.
        if supports and supports[0] == ():
            constant += coeffs[0]
            supports = supports[1:]
            coeffs = coeffs[1:]
        self.constant = constant
        self._supports = supports
        self._coeffs = coeffs
        self._arrays = None

    @classmethod
    def constant_poly(cls, n, value):
        return cls(n, constant=value)

    @property
    def num_terms(self):
        return len(self._coeffs)

    @property
    def terms(self):
        return list(zip(self._coeffs, self._supports))

    def __repr__(self):
        parts = [f"{self.constant:g}"]
        parts += [
            f"{c:g}*q{list(s)}" for c, s in zip(self._coeffs, self._supports)
        ]
        return f"ComplementPolynomial(n={self.n}, {' + '.join(parts)})"

    def _require_same_n(self, other):
        if self.n != other.n:
            raise ValueError(
                f"dimension mismatch: {self.n} vs {other.n} variables"
            )

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return ComplementPolynomial(
                self.n,
                constant=self.constant + other,
                _canonical_parts=(self._supports, self._coeffs),
            )
        if not isinstance(other, ComplementPolynomial):
            return NotImplemented
        self._require_same_n(other)
        items = list(zip(self._coeffs, self._supports))
        items += list(zip(other._coeffs, other._supports))
        return ComplementPolynomial(
            self.n,
            constant=self.constant + other.constant,
            _canonical_parts=_canonical(self.n, items),
        )

    __radd__ = __add__

    def scale(self, factor):
        factor = float(factor)
        items = [(c * factor, s) for c, s in zip(self._coeffs, self._supports)]
        return ComplementPolynomial(
            self.n,
            constant=self.constant * factor,
            _canonical_parts=_canonical(self.n, items),
        )

    def __mul__(self, other, budget=None):
        """Product with multilinear reduction (union of supports)."""
        if isinstance(other, (int, float)):
            return self.scale(other)
        if not isinstance(other, ComplementPolynomial):
            return NotImplemented
        self._require_same_n(other)
        a = [(self.constant, ())] + list(zip(self._coeffs, self._supports))
        b = [(other.constant, ())] + list(zip(other._coeffs, other._supports))
        items = []
        for ca, sa in a:
            if ca == 0.0:
                continue
            set_a = set(sa)
            for cb, sb in b:
                if cb == 0.0:
                    continue
                union = sa if not sb else tuple(sorted(set_a.union(sb)))
                items.append((ca * cb, union))
        return ComplementPolynomial(
            self.n, _canonical_parts=_canonical(self.n, items, budget=budget)
        )

    __rmul__ = __mul__

    def power(self, exponent, budget=None):
        if exponent < 0:
            raise ValueError("negative powers are not defined")
        result = ComplementPolynomial.constant_poly(self.n, 1.0)
        for _ in range(int(exponent)):
            result = result.__mul__(self, budget=budget)
        return result

    # -- evaluation ---------------------------------------------------

    def _flat_arrays(self):
        if self._arrays is None:
            coeffs, flat, offsets = [], [], [0]
            for c, s in zip(self._coeffs, self._supports):
                coeffs.append(c)
                flat.extend(s)
                offsets.append(len(flat))
            self._arrays = (
                np.asarray(coeffs, dtype=np.float64),
                np.asarray(flat, dtype=np.int64),
                np.asarray(offsets, dtype=np.int64),
            )
        return self._arrays

    def evaluate(self, y):
        """Value of the multilinear extension at y in [0,1]^n."""
        y = np.asarray(y, dtype=np.float64)
        coeffs, flat, offsets = self._flat_arrays()
        return self.constant + poly_value(
            coeffs, flat, offsets, y, complement=True
        )

    def gradient(self, y):
        """All coordinate differences of the multilinear extension."""
        y = np.asarray(y, dtype=np.float64)
        coeffs, flat, offsets = self._flat_arrays()
        return poly_grad(coeffs, flat, offsets, y, self.n, complement=True)

    def coordinate_difference(self, i, y):
        if not 0 <= i < self.n:
            raise ValueError(f"coordinate {i} out of range [0, {self.n})")
        y = np.asarray(y, dtype=np.float64)
        total = 0.0
        for c, s in zip(self._coeffs, self._supports):
            if i not in s:
                continue
            prod = -c
            for j in s:
                if j != i:
                    prod *= 1.0 - y[j]
            total += prod
        return total

    # -- conversion ---------------------------------------------------

    def to_multilinear(self, budget=None):
        """Expand into standard monomials; may be exponentially larger.

        Each complement factor expands by inclusion-exclusion, so a term
        with support A becomes 2^|A| signed monomials.  ``budget`` bounds
        the merged monomial count; exceeding it raises
        BudgetExceededError rather than truncating.
        """
        merged = {(): self.constant}
        for c, s in zip(self._coeffs, self._supports):
            if budget is not None and len(s) > 40:
                raise BudgetExceededError(
                    f"expansion of a {len(s)}-variable complement term "
                    f"exceeds any practical budget"
                )
            for code in range(1 << len(s)):
                subset = tuple(s[b] for b in range(len(s)) if code & (1 << b))
                sign = -1.0 if len(subset) % 2 else 1.0
                merged[subset] = merged.get(subset, 0.0) + sign * c
                if budget is not None and len(merged) > budget:
                    raise BudgetExceededError(
                        f"monomial budget exceeded ({len(merged)} > {budget})"
                    )
        supports = []
        coeffs = []
        for key in sorted(merged):
            value = merged[key]
            if abs(value) < COEFF_EPS:
                continue
            supports.append(key)
            coeffs.append(value)
        return MultilinearPolynomial(
            self.n, _canonical_parts=(tuple(supports), tuple(coeffs))
        )

    @classmethod
    def from_multilinear(cls, p):
        """Inverse of to_multilinear (used by tests; same caveats)."""
        items = []
        constant = 0.0
        for mono in p.terms:
            # prod y_i = prod (1 - (1 - y_i)) expands over subsets.
            s = mono.support
            if len(s) > 25:
                raise BudgetExceededError("term too wide to convert")
            for code in range(1 << len(s)):
                subset = tuple(
                    s[b] for b in range(len(s)) if code & (1 << b)
                )
                sign = -1.0 if len(subset) % 2 else 1.0
                if subset:
                    items.append((sign * mono.coefficient, subset))
                else:
                    constant += mono.coefficient
        return cls(p.n, constant=constant, items=items)
