"""Brute-force ground truth for small instances.

Exact multilinear extensions and gradients by full enumeration, exact
discrete optima over matroids, a lazy-greedy baseline, and the
bias-bound verification harness for the polynomial surrogates.
"""

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

# Full enumeration is allowed up to this many ground-set variables
# (one 2^n table of doubles per realization).
EXACT_LIMIT = 20

DEFAULT_ENUMERATION_BUDGET = 2_000_000


def binary_table_complement(constant, terms, n):
    """Values of a complement-form polynomial at every binary input.

    Index x encodes the input: bit i of x is variable i.
    """
    if n > EXACT_LIMIT:
        raise ValueError(f"{n} variables exceed the enumeration limit {EXACT_LIMIT}")
    xs = np.arange(1 << n, dtype=np.uint64)
    vals = np.full(1 << n, float(constant))
    for coeff, support in terms:
        mask = np.uint64(sum(1 << int(i) for i in support))
        vals += np.where((xs & mask) == np.uint64(0), coeff, 0.0)
    return vals


class ExactEnumerator:
    """Cached per-realization tables of f_z over all binary inputs."""

    def __init__(self, obj):
        if obj.n > EXACT_LIMIT:
            raise ValueError(
                f"ground set of size {obj.n} exceeds the enumeration "
                f"limit {EXACT_LIMIT}"
            )
        self.obj = obj
        self._tables = {}
        self._mean = None

    def table(self, z):
        key = self.obj.realization_key(z)
        hit = self._tables.get(key)
        if hit is not None:
            return hit
        obj = self.obj
        comps = obj.components(z)
        total = np.zeros(1 << obj.n)
        for c in range(comps.num_components):
            sel = comps.term_comp == c
            terms = [
                (comps.coeffs[t], comps.flat[comps.offsets[t]:comps.offsets[t + 1]])
                for t in np.nonzero(sel)[0]
            ]
            g = binary_table_complement(comps.comp_const[c], terms, obj.n)
            if obj.link == "log1p":
                total += np.log1p(g)
            else:
                g0 = comps.g0[c]
                total += g0 / (1.0 - g0) - g / (1.0 - g)
        self._tables[key] = total
        return total

    def mean_table(self):
        """Average of f_z tables over all stored realizations."""
        if self._mean is None:
            total = np.zeros(1 << self.obj.n)
            for z in self.obj.realization_ids():
                total += self.table(z)
            self._mean = total / max(self.obj.num_realizations, 1)
        return self._mean

    @staticmethod
    def _contract(table, y):
        """Expectation of the table under independent Bernoulli(y)."""
        res = table
        for i in range(len(y)):
            res = res.reshape(-1, 2)
            res = res[:, 0] * (1.0 - y[i]) + res[:, 1] * y[i]
        return float(res[0])

    def extension(self, z, y):
        """Exact multilinear extension of f_z at y."""
        y = np.asarray(y, dtype=np.float64)
        return self._contract(self.table(z), y)

    def mean_extension(self, y):
        y = np.asarray(y, dtype=np.float64)
        return self._contract(self.mean_table(), y)

    def gradient(self, z, y):
        """Exact coordinate differences of the extension of f_z."""
        y = np.asarray(y, dtype=np.float64)
        table = self.table(z)
        out = np.zeros(self.obj.n)
        for i in range(self.obj.n):
            hi = y.copy()
            hi[i] = 1.0
            lo = y.copy()
            lo[i] = 0.0
            out[i] = self._contract(table, hi) - self._contract(table, lo)
        return out

    def set_value(self, x_mask):
        """Mean objective value of the set encoded by the bitmask."""
        return float(self.mean_table()[x_mask])


def enumerator_for(obj):
    """Per-objective cached enumerator."""
    enum = getattr(obj, "_exact_enumerator", None)
    if enum is None:
        enum = ExactEnumerator(obj)
        obj._exact_enumerator = enum
    return enum


def exact_extension(obj, y):
    """Mean over stored realizations of the exact extension at y."""
    return enumerator_for(obj).mean_extension(y)


def mean_value(obj, indices):
    """Mean objective value of a set, without the 2^n table."""
    x = np.zeros(obj.n, dtype=np.uint8)
    x[list(indices)] = 1
    total = 0.0
    for z in obj.realization_ids():
        total += obj.f_eval(z, x)
    return total / max(obj.num_realizations, 1)


# ---------------------------------------------------------------------
# Discrete optimum
# ---------------------------------------------------------------------


@dataclass
class OptReport:
    best_set: tuple
    best_value: float
    num_sets: int
    f_max: float

    def to_json_dict(self):
        return {
            "best_set": list(self.best_set),
            "best_value": self.best_value,
            "num_independent_sets": self.num_sets,
            "max_singleton_value": self.f_max,
        }


def count_independent_sets(matroid):
    if matroid.kind == "uniform":
        return sum(
            math.comb(matroid.n, s) for s in range(min(matroid.k, matroid.n) + 1)
        )
    total = 1
    for block, cap in zip(matroid.blocks, matroid.caps):
        total *= sum(
            math.comb(len(block), s) for s in range(min(cap, len(block)) + 1)
        )
    return total


def iter_independent_sets(matroid):
    """All independent sets, deterministic order."""
    if matroid.kind == "uniform":
        groups = [(tuple(range(matroid.n)), min(matroid.k, matroid.n))]
    else:
        groups = [
            (block, min(cap, len(block)))
            for block, cap in zip(matroid.blocks, matroid.caps)
        ]
    per_block = []
    for block, cap in groups:
        choices = []
        for size in range(cap + 1):
            choices.extend(itertools.combinations(block, size))
        per_block.append(choices)
    for combo in itertools.product(*per_block):
        yield tuple(sorted(itertools.chain.from_iterable(combo)))


def brute_force_opt(obj, matroid, budget=DEFAULT_ENUMERATION_BUDGET):
    """Exhaustive maximum of the mean objective over independent sets."""
    num_sets = count_independent_sets(matroid)
    if num_sets > budget:
        raise ValueError(
            f"enumeration budget exceeded: {num_sets} independent sets "
            f"> {budget}"
        )
    use_tables = obj.n <= EXACT_LIMIT
    enum = enumerator_for(obj) if use_tables else None
    best_set = ()
    best_value = -math.inf
    for s in iter_independent_sets(matroid):
        if use_tables:
            mask = sum(1 << i for i in s)
            value = enum.set_value(mask)
        else:
            value = mean_value(obj, s)
        if value > best_value:
            best_value = value
            best_set = s
    f_max = max(
        (mean_value(obj, (i,)) for i in range(obj.n)), default=0.0
    )
    return OptReport(best_set, float(best_value), num_sets, float(f_max))


def greedy_baseline(obj, matroid):
    """Lazy greedy over mean marginal gains, respecting the matroid."""
    use_tables = obj.n <= EXACT_LIMIT
    enum = enumerator_for(obj) if use_tables else None

    def value(indices):
        if use_tables:
            return enum.set_value(sum(1 << i for i in indices))
        return mean_value(obj, indices)

    chosen = []
    current = value(())
    # Max-heap of stale upper bounds on marginal gains (valid upper
    # bounds by submodularity); ties break to the lowest index.
    heap = [(-(value((i,)) - current), i) for i in range(obj.n)]
    heapq.heapify(heap)
    while True:
        accepted = False
        while heap:
            _, i = heapq.heappop(heap)
            if i in chosen or not matroid.is_independent(chosen + [i]):
                continue
            fresh = value(chosen + [i]) - current
            if heap and fresh < -heap[0][0] - 1e-15:
                heapq.heappush(heap, (-fresh, i))
                continue
            # fresh dominates every remaining stale bound, so i is the
            # best feasible candidate right now.
            if fresh <= 1e-15:
                heap.clear()
                break
            chosen.append(i)
            current += fresh
            accepted = True
            break
        if not accepted:
            break
    return tuple(sorted(chosen)), current


# ---------------------------------------------------------------------
# Bias-bound verification
# ---------------------------------------------------------------------


@dataclass
class BiasCheck:
    """Observed surrogate errors of one realization at one degree."""

    z_key: object
    degree: int
    max_binary_error: float
    binary_bound: float
    max_gradient_error: float
    gradient_bound: float

    @property
    def binary_margin(self):
        return self.binary_bound - self.max_binary_error

    @property
    def gradient_margin(self):
        return self.gradient_bound - self.max_gradient_error

    def _float_slack(self, bound):
        # The queue-gain bound is attained with equality at the empty
        # input, so a representation-level allowance is needed for the
        # pass judgment; raw margins stay unrounded in the report.
        return 32 * np.finfo(float).eps * max(1.0, abs(bound))

    @property
    def ok(self):
        return (
            self.binary_margin >= -self._float_slack(self.binary_bound)
            and self.gradient_margin >= -self._float_slack(self.gradient_bound)
        )

    def row(self):
        return (
            str(self.z_key), self.degree,
            self.max_binary_error, self.binary_bound, self.binary_margin,
            self.max_gradient_error, self.gradient_bound, self.gradient_margin,
        )


def verify_bias(obj, degrees, zs=None, num_points=20, rng=None):
    """Check surrogate error bounds on enumerable instances.

    For each realization and degree reports (a) the max binary-input
    error of the composed surrogate against its bound (the scalar Taylor
    bound times the number of link compositions) and (b) the max
    gradient l2 error over random fractional points against
    2 sqrt(n) times the scalar bound.  Failures are reported via
    negative margins, not raised.
    """
    from .estimators import polynomial_gradient

    if rng is None:
        rng = np.random.default_rng(0)
    enum = enumerator_for(obj)
    if zs is None:
        zs = list(obj.realization_ids())
    points = [rng.random(obj.n) for _ in range(num_points)]
    checks = []
    for z in zs:
        f_table = enum.table(z)
        for degree in degrees:
            surrogate = obj.surrogate_complement(z, degree)
            s_table = binary_table_complement(
                surrogate.constant, surrogate.terms, obj.n
            )
            max_binary = float(np.max(np.abs(f_table - s_table)))
            eps = obj.bias_bound(degree)
            binary_bound = obj.links_per_realization(z) * eps
            grad_bound = 2.0 * math.sqrt(obj.n) * eps
            max_grad = 0.0
            for y in points:
                exact = enum.gradient(z, y)
                approx = polynomial_gradient(obj, z, y, degree).values
                err = float(np.linalg.norm(exact - approx))
                max_grad = max(max_grad, err)
            checks.append(
                BiasCheck(
                    obj.realization_key(z), degree,
                    max_binary, binary_bound, max_grad, grad_bound,
                )
            )
    return checks


BIAS_TSV_HEADER = (
    "z_id\tdegree\tbinary_error\tbinary_bound\tbinary_margin"
    "\tgradient_error\tgradient_bound\tgradient_margin"
)


def bias_checks_to_tsv(checks):
    lines = [BIAS_TSV_HEADER]
    for check in checks:
        z, degree, be, bb, bm, ge, gb, gm = check.row()
        lines.append(
            f"{z}\t{degree}\t{be!r}\t{bb!r}\t{bm!r}\t{ge!r}\t{gb!r}\t{gm!r}"
        )
    return "\n".join(lines) + "\n"
