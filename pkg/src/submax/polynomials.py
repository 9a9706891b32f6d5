"""Sparse multilinear polynomial algebra over ground-set variables.

A multilinear polynomial is stored as a merged list of monomials, each
a coefficient together with a strictly increasing support of variable
indices (the empty support is the constant term).  All products apply
multilinear reduction on the fly: supports are merged by set union,
which is the correct product rule on {0,1}-valued variables where
``x**k == x``.

Evaluating a multilinear polynomial at a fractional point ``y`` in
[0,1]^n simultaneously computes the expectation of the polynomial under
independent Bernoulli(y_i) coordinates; this identity is what the
gradient estimators are built on.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import poly_grad, poly_value

# Coefficients smaller than this after merging are dropped; prevents
# term-list blowup from near-cancellations.
COEFF_EPS = 1e-15


class BudgetExceededError(RuntimeError):
    """Raised when an expansion would exceed its monomial budget."""


@dataclass(frozen=True)
class Monomial:
    """coefficient * prod(y_i for i in support); support strictly increasing."""

    coefficient: float
    support: tuple

    def degree(self):
        return len(self.support)


def _canonical(n, items, budget=None):
    """Merge (coeff, support) pairs into canonical term order.

    Returns parallel tuples (supports, coeffs) sorted by support.
    """
    merged = {}
    for coeff, support in items:
        key = tuple(support)
        merged[key] = merged.get(key, 0.0) + coeff
        if budget is not None and len(merged) > budget:
            raise BudgetExceededError(
                f"monomial budget exceeded ({len(merged)} > {budget})"
            )
    supports = []
    coeffs = []
    for key in sorted(merged):
        c = merged[key]
        if abs(c) < COEFF_EPS:
            continue
        supports.append(key)
        coeffs.append(float(c))
    return tuple(supports), tuple(coeffs)


def _check_support(support, n):
    prev = -1
    for i in support:
        if not isinstance(i, (int, np.integer)):
            raise ValueError(f"variable index {i!r} is not an integer")
        if i <= prev:
            raise ValueError(f"support {support!r} is not strictly increasing")
        if not 0 <= i < n:
            raise ValueError(f"variable index {i} out of range [0, {n})")
        prev = i


class MultilinearPolynomial:
    """Canonical merged multilinear polynomial on n ground-set variables.

    Immutable; all operations return new instances.  Hot evaluation
    paths run through the kernel backend on flattened term arrays.
    """

    __slots__ = ("n", "_supports", "_coeffs", "_arrays")

    def __init__(self, n, items=(), _canonical_parts=None):
        if n < 0:
            raise ValueError("ground-set size must be nonnegative")
        self.n = int(n)
        if _canonical_parts is not None:
            self._supports, self._coeffs = _canonical_parts
        else:
            checked = []
            for coeff, support in items:
                support = tuple(int(i) for i in support)
                _check_support(support, self.n)
                checked.append((float(coeff), support))
            self._supports, self._coeffs = _canonical(self.n, checked)
        self._arrays = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, value):
        return cls(n, [(value, ())])

    @classmethod
    def variable(cls, n, i):
        return cls(n, [(1.0, (i,))])

    # -- inspection ---------------------------------------------------

    @property
    def terms(self):
        return [Monomial(c, s) for c, s in zip(self._coeffs, self._supports)]

    @property
    def num_terms(self):
        return len(self._coeffs)

    @property
    def is_zero(self):
        return not self._coeffs

    def constant_term(self):
        if self._supports and self._supports[0] == ():
            return self._coeffs[0]
        return 0.0

    def __eq__(self, other):
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        return (
            self.n == other.n
            and self._supports == other._supports
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self.n, self._supports, self._coeffs))

    def __repr__(self):
        if self.is_zero:
            return f"MultilinearPolynomial(n={self.n}, 0)"
        parts = [
            f"{c:g}*y{list(s)}" if s else f"{c:g}"
            for c, s in zip(self._coeffs, self._supports)
        ]
        return f"MultilinearPolynomial(n={self.n}, {' + '.join(parts)})"

    # -- algebra ------------------------------------------------------

    def _require_same_n(self, other):
        if self.n != other.n:
            raise ValueError(
                f"dimension mismatch: {self.n} vs {other.n} variables"
            )

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = MultilinearPolynomial.constant(self.n, other)
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        self._require_same_n(other)
        items = list(zip(self._coeffs, self._supports))
        items += list(zip(other._coeffs, other._supports))
        return MultilinearPolynomial(
            self.n, _canonical_parts=_canonical(self.n, items)
        )

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = MultilinearPolynomial.constant(self.n, other)
        return self + other.scale(-1.0)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, factor):
        factor = float(factor)
        if factor == 0.0:
            return MultilinearPolynomial.zero(self.n)
        items = [(c * factor, s) for c, s in zip(self._coeffs, self._supports)]
        return MultilinearPolynomial(
            self.n, _canonical_parts=_canonical(self.n, items)
        )

    def __mul__(self, other, budget=None):
        """Product with multilinear reduction (supports merge by union)."""
        if isinstance(other, (int, float)):
            return self.scale(other)
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        self._require_same_n(other)
        items = []
        for ca, sa in zip(self._coeffs, self._supports):
            set_a = set(sa)
            for cb, sb in zip(other._coeffs, other._supports):
                union = sa if not sb else tuple(sorted(set_a.union(sb)))
                items.append((ca * cb, union))
        return MultilinearPolynomial(
            self.n, _canonical_parts=_canonical(self.n, items, budget=budget)
        )

    __rmul__ = __mul__

    def power(self, exponent, budget=None):
        if exponent < 0:
            raise ValueError("negative powers are not defined")
        result = MultilinearPolynomial.constant(self.n, 1.0)
        for _ in range(int(exponent)):
            result = result.__mul__(self, budget=budget)
        return result

    # -- evaluation ---------------------------------------------------

    def _flat_arrays(self):
        """(constant, coeffs, flat, offsets) with nonempty supports only."""
        if self._arrays is None:
            constant = 0.0
            coeffs, flat, offsets = [], [], [0]
            for c, s in zip(self._coeffs, self._supports):
                if not s:
                    constant = c
                    continue
                coeffs.append(c)
                flat.extend(s)
                offsets.append(len(flat))
            self._arrays = (
                constant,
                np.asarray(coeffs, dtype=np.float64),
                np.asarray(flat, dtype=np.int64),
                np.asarray(offsets, dtype=np.int64),
            )
        return self._arrays

    def _prepare_point(self, y, clamp):
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.n,):
            raise ValueError(
                f"point has shape {y.shape}, expected ({self.n},)"
            )
        if clamp:
            return np.clip(y, 0.0, 1.0)
        if self.n and (y.min() < 0.0 or y.max() > 1.0):
            bad = int(np.argmax((y < 0.0) | (y > 1.0)))
            raise ValueError(
                f"coordinate {bad} = {y[bad]} outside [0, 1]"
                " (use clamp=True to clamp instead)"
            )
        return y

    def evaluate(self, y, clamp=False):
        """Value at y in [0,1]^n; equals E[p(x)] for x ~ Bernoulli(y)."""
        y = self._prepare_point(y, clamp)
        constant, coeffs, flat, offsets = self._flat_arrays()
        return constant + poly_value(coeffs, flat, offsets, y, complement=False)

    def coordinate_difference(self, i, y, clamp=False):
        """evaluate at y with y_i=1, minus y_i=0; independent of y_i."""
        if not 0 <= i < self.n:
            raise ValueError(f"coordinate {i} out of range [0, {self.n})")
        y = self._prepare_point(y, clamp)
        total = 0.0
        for c, s in zip(self._coeffs, self._supports):
            if i not in s:
                continue
            prod = c
            for j in s:
                if j != i:
                    prod *= y[j]
            total += prod
        return total

    def gradient(self, y, clamp=False):
        """All coordinate differences at once (kernel-backed)."""
        y = self._prepare_point(y, clamp)
        _, coeffs, flat, offsets = self._flat_arrays()
        return poly_grad(coeffs, flat, offsets, y, self.n, complement=False)

    # -- serialization ------------------------------------------------

    def to_text(self):
        """Line-oriented form ``coeff:i1,i2,...`` (constant: empty list)."""
        lines = []
        for c, s in zip(self._coeffs, self._supports):
            lines.append(f"{c!r}:{','.join(str(i) for i in s)}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text, n):
        items = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                coeff_part, _, idx_part = line.partition(":")
                coeff = float(coeff_part)
                support = tuple(
                    int(tok) for tok in idx_part.split(",") if tok != ""
                )
            except ValueError as exc:
                raise ValueError(f"malformed line {lineno}: {line!r}") from exc
            items.append((coeff, support))
        return cls(n, items)


class GeneralPolynomial:
    """Polynomial with explicit exponents; input to multilinearization.

    Terms are (coefficient, ((variable, exponent), ...)) with exponents
    >= 1 and variables strictly increasing within a term.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n, terms):
        self.n = int(n)
        cleaned = []
        for coeff, powers in terms:
            powers = tuple((int(v), int(e)) for v, e in powers)
            prev = -1
            for v, e in powers:
                if not 0 <= v < self.n:
                    raise ValueError(
                        f"variable index {v} out of range [0, {self.n})"
                    )
                if v <= prev:
                    raise ValueError(
                        f"term variables {powers!r} not strictly increasing"
                    )
                if e < 1:
                    raise ValueError(f"exponent {e} < 1 for variable {v}")
                prev = v
            cleaned.append((float(coeff), powers))
        self.terms = tuple(cleaned)

    def evaluate(self, y):
        """Plain polynomial value with true exponents (no reduction)."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.n,):
            raise ValueError(f"point has shape {y.shape}, expected ({self.n},)")
        total = 0.0
        for coeff, powers in self.terms:
            prod = coeff
            for v, e in powers:
                prod *= y[v] ** e
            total += prod
        return total

    def degree(self):
        return max(
            (sum(e for _, e in powers) for _, powers in self.terms),
            default=0,
        )


def multilinearize(p, budget=None):
    """Collapse every exponent to 1 and merge supports.

    The result agrees with ``p`` on all binary inputs, and its value at
    fractional ``y`` equals the expectation of ``p`` under independent
    Bernoulli(y) coordinates.
    """
    if not isinstance(p, GeneralPolynomial):
        raise TypeError("multilinearize expects a GeneralPolynomial")
    items = []
    for coeff, powers in p.terms:
        support = tuple(v for v, _ in powers)
        _check_support(support, p.n)
        items.append((coeff, support))
    return MultilinearPolynomial(
        p.n, _canonical_parts=_canonical(p.n, items, budget=budget)
    )
