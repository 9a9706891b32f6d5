"""Stochastic objective families and their polynomial surrogates.

Each family provides, per sampled realization z:

* a black-box evaluator ``f_eval(z, x)`` on binary inputs,
* inner coverage polynomials g (one per additive component) feeding a
  scalar concave link h, kept in complement-product form,
* degree-L Taylor surrogates of h composed with g, multilinearized,
  which drive the deterministic gradient estimator.

Families
--------
SM  diversity-rewarded summarization: f_z = sum_j log(1 + sum_{i in P_j} r_i x_i)
IM  influence maximization over cascade traces: f_z = log(1 + covered fraction)
FL  facility location (max-coverage telescoping): f_z = log(1 + max weight)
CN  cache networks: per-edge queue-size gain with h(s) = s / (1 - s)
"""

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from ._kernels import LINK_LOG1P, LINK_QGAIN, component_values
from .complement import ComplementPolynomial

DEFAULT_MONOMIAL_BUDGET = 2_000_000

# Degrees above the supported sweet spot are allowed but the monomial
# budget will bite first on nontrivial instances.
SUPPORTED_DEGREES = (1, 2, 3)


# ---------------------------------------------------------------------
# Scalar Taylor approximants of the concave links
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarTaylor:
    """Degree-L polynomial approximant of a scalar link function.

    ``coeffs[l]`` multiplies ``(s - center)**l``.
    """

    link: str
    degree: int
    center: float
    coeffs: tuple

    def __call__(self, s):
        ds = np.asarray(s, dtype=np.float64) - self.center
        total = np.zeros_like(ds)
        for a in reversed(self.coeffs):
            total = total * ds + a
        return total if total.ndim else float(total)


def taylor_expansion(link, degree):
    """Taylor approximant of the named link.

    log1p: expansion of log(1+s) around 1/2, with
    d^l/ds^l log(1+s) = (-1)^(l-1) (l-1)! / (1+s)^l, so the l-th
    coefficient is (-1)^(l-1) (2/3)^l / l.

    geometric: truncated series of s/(1-s) around 0, i.e. s + s^2 + ...
    + s^L (constant term zero).
    """
    degree = int(degree)
    if link == "log1p":
        if degree < 0:
            raise ValueError("degree must be >= 0")
        coeffs = [math.log(1.5)]
        for l in range(1, degree + 1):
            coeffs.append((-1.0) ** (l - 1) * (2.0 / 3.0) ** l / l)
        return ScalarTaylor("log1p", degree, 0.5, tuple(coeffs))
    if link == "geometric":
        if degree < 1:
            raise ValueError("geometric link requires degree >= 1")
        return ScalarTaylor(
            "geometric", degree, 0.0, (0.0,) + (1.0,) * degree
        )
    raise ValueError(f"unknown link {link!r}")


def log1p_taylor_bound(degree):
    """Uniform error of the degree-L log1p approximant on [0, 1]."""
    return 1.0 / ((degree + 1) * 2.0 ** (degree + 1))


def geometric_tail_bound(degree, load):
    """Uniform error of the truncated geometric series on [0, load]."""
    return load ** (degree + 1) / (1.0 - load)


# ---------------------------------------------------------------------
# Flattened per-realization computational form
# ---------------------------------------------------------------------


@dataclass
class LinkedComponents:
    """Component polynomials of one realization, flattened for kernels."""

    n: int
    link_code: int
    comp_const: np.ndarray  # (C,)
    coeffs: np.ndarray      # (T,) complement-term coefficients
    flat: np.ndarray        # concatenated supports
    offsets: np.ndarray     # (T+1,)
    term_comp: np.ndarray   # (T,) component of each term
    comp_of_var: np.ndarray  # (n,) component of each variable, -1 if none
    g0: np.ndarray = field(default=None)  # (C,) value at the all-zero input

    def __post_init__(self):
        if self.g0 is None:
            g0 = np.array(self.comp_const, copy=True)
            np.add.at(g0, self.term_comp, self.coeffs)
            self.g0 = g0

    @property
    def num_components(self):
        return len(self.comp_const)

    def values_at(self, x):
        """g_c(x) for binary x (uint8 vector)."""
        return component_values(
            self.coeffs, self.flat, self.offsets, self.term_comp,
            self.comp_const, x,
        )


def _flatten_components(n, link_code, polys):
    comp_const, coeffs, flat, offsets, term_comp = [], [], [], [0], []
    comp_of_var = np.full(n, -1, dtype=np.int64)
    for c, poly in enumerate(polys):
        comp_const.append(poly.constant)
        for coeff, support in poly.terms:
            coeffs.append(coeff)
            flat.extend(support)
            offsets.append(len(flat))
            term_comp.append(c)
            for i in support:
                if comp_of_var[i] not in (-1, c):
                    raise ValueError(
                        f"variable {i} appears in two components"
                    )
                comp_of_var[i] = c
    return LinkedComponents(
        n=n,
        link_code=link_code,
        comp_const=np.asarray(comp_const, dtype=np.float64),
        coeffs=np.asarray(coeffs, dtype=np.float64),
        flat=np.asarray(flat, dtype=np.int64),
        offsets=np.asarray(offsets, dtype=np.int64),
        term_comp=np.asarray(term_comp, dtype=np.int64),
        comp_of_var=comp_of_var,
    )


def _check_binary(x, n):
    x = np.asarray(x)
    if x.shape != (n,):
        raise ValueError(f"binary input has shape {x.shape}, expected ({n},)")
    as_int = x.astype(np.int64)
    if not np.array_equal(as_int, x) or ((as_int != 0) & (as_int != 1)).any():
        raise ValueError("input vector is not binary")
    return as_int.astype(np.uint8)


# ---------------------------------------------------------------------
# Base class
# ---------------------------------------------------------------------


class StochasticObjective:
    """Monotone submodular objective given as an average over realizations."""

    family = None
    link = None  # "log1p" or "geometric"

    def __init__(self, n):
        self.n = int(n)
        self._component_cache = {}
        self._surrogate_cache = {}
        self._cache_lock = threading.Lock()

    # -- realization store ---------------------------------------------

    @property
    def num_realizations(self):
        raise NotImplementedError

    def realization_ids(self):
        return range(self.num_realizations)

    def sample_realization(self, rng):
        """Uniformly random stored realization handle."""
        if self.num_realizations == 0:
            raise ValueError("objective holds no realizations")
        return int(rng.integers(self.num_realizations))

    def realization_key(self, z):
        return z

    # -- per-realization structure ---------------------------------------

    def _build_components(self, z):
        """Family-specific list of ComplementPolynomial inner functions."""
        raise NotImplementedError

    @property
    def link_code(self):
        return LINK_LOG1P if self.link == "log1p" else LINK_QGAIN

    def components(self, z):
        key = self.realization_key(z)
        hit = self._component_cache.get(key)
        if hit is not None:
            return hit
        polys = self._build_components(z)
        flat = _flatten_components(self.n, self.link_code, polys)
        with self._cache_lock:
            self._component_cache[key] = flat
        return flat

    def inner_polynomials(self, z, budget=DEFAULT_MONOMIAL_BUDGET):
        """Standard-basis expansions of the inner coverage polynomials."""
        return [
            poly.to_multilinear(budget=budget)
            for poly in self._build_components(z)
        ]

    # -- evaluation -------------------------------------------------------

    def f_eval(self, z, x):
        """Exact realization value at a binary input."""
        x = _check_binary(x, self.n)
        comps = self.components(z)
        g = comps.values_at(x)
        if self.link == "log1p":
            return float(np.log1p(g).sum())
        gain = comps.g0 / (1.0 - comps.g0) - g / (1.0 - g)
        return float(gain.sum())

    # -- Taylor surrogate -------------------------------------------------

    def taylor(self, degree):
        link = "log1p" if self.link == "log1p" else "geometric"
        return taylor_expansion(link, degree)

    def surrogate_complement(self, z, degree, budget=DEFAULT_MONOMIAL_BUDGET):
        """Degree-L surrogate of f_z, multilinearized, in complement form.

        The scalar link of each component is replaced by its Taylor
        approximant and composed with the inner polynomial; products are
        multilinear-reducing, so the result is exactly the multilinear
        extension of the surrogate.
        """
        key = (self.realization_key(z), int(degree))
        hit = self._surrogate_cache.get(key)
        if hit is not None:
            return hit
        approx = self.taylor(degree)
        total = ComplementPolynomial.constant_poly(self.n, 0.0)
        for poly in self._build_components(z):
            if self.link == "log1p":
                shifted = poly + (-approx.center)
                power = ComplementPolynomial.constant_poly(self.n, 1.0)
                acc = ComplementPolynomial.constant_poly(
                    self.n, approx.coeffs[0]
                )
                for a in approx.coeffs[1:]:
                    power = power.__mul__(shifted, budget=budget)
                    acc = acc + power.scale(a)
            else:
                g0 = poly.constant + sum(c for c, _ in poly.terms)
                acc = ComplementPolynomial.constant_poly(
                    self.n, g0 / (1.0 - g0)
                )
                power = ComplementPolynomial.constant_poly(self.n, 1.0)
                for _ in range(degree):
                    power = power.__mul__(poly, budget=budget)
                    acc = acc + power.scale(-1.0)
            total = total + acc
        with self._cache_lock:
            self._surrogate_cache[key] = total
        return total

    def compose_surrogate(self, z, degree, budget=DEFAULT_MONOMIAL_BUDGET):
        """Standard-basis multilinear surrogate (may hit the budget)."""
        return self.surrogate_complement(z, degree, budget=budget).to_multilinear(
            budget=budget
        )

    def bias_bound(self, degree):
        """Uniform binary-input error of one link composition."""
        raise NotImplementedError

    def links_per_realization(self, z):
        """Number of link compositions summed in f_z.

        The binary-input error of the composed surrogate is bounded by
        this count times ``bias_bound``; the gradient bias bound does
        not pick up the factor because disjoint components cancel in
        coordinate differences.
        """
        return len(self.components(z).comp_const)


# ---------------------------------------------------------------------
# SM: diversity-rewarded summarization
# ---------------------------------------------------------------------


class SummarizationObjective(StochasticObjective):
    """Tokens with per-realization values, partitioned into subjects."""

    family = "SM"
    link = "log1p"

    def __init__(self, partitions, values):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("values must be (num_realizations, n)")
        super().__init__(values.shape[1])
        if (values < 0).any():
            raise ValueError("token values must be nonnegative")
        sums = values.sum(axis=1)
        if not np.allclose(sums, 1.0, atol=1e-8):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ValueError(
                f"realization {bad} values sum to {sums[bad]}, expected 1"
            )
        seen = np.zeros(self.n, dtype=bool)
        self.partitions = tuple(
            tuple(sorted(int(i) for i in part)) for part in partitions
        )
        for part in self.partitions:
            for i in part:
                if not 0 <= i < self.n:
                    raise ValueError(f"token {i} out of range [0, {self.n})")
                if seen[i]:
                    raise ValueError(f"token {i} in two partitions")
                seen[i] = True
        if not seen.all():
            raise ValueError("partitions do not cover all tokens")
        self.values = values

    @property
    def num_realizations(self):
        return self.values.shape[0]

    def _build_components(self, z):
        r = self.values[z]
        polys = []
        for part in self.partitions:
            items = [(-r[i], (i,)) for i in part if r[i] != 0.0]
            const = float(sum(r[i] for i in part))
            polys.append(ComplementPolynomial(self.n, const, items))
        return polys

    def bias_bound(self, degree):
        return log1p_taylor_bound(degree)


# ---------------------------------------------------------------------
# IM: influence maximization over cascade traces
# ---------------------------------------------------------------------


class InfluenceObjective(StochasticObjective):
    """Cascade traces mapping each node to its reachability set.

    A node's coverage term fires when any member of its reachability set
    is seeded; every set contains the node itself, so seeding all nodes
    covers everything and the coverage fraction reaches 1.
    """

    family = "IM"
    link = "log1p"

    def __init__(self, num_nodes, traces=(), graph=None, p=None):
        super().__init__(num_nodes)
        self.traces = [self._check_trace(t) for t in traces]
        self._graph = graph
        self._p = p
        if graph is not None and p is None:
            raise ValueError("generative mode requires an edge probability")

    def _check_trace(self, trace):
        if len(trace) != self.n:
            raise ValueError(
                f"trace covers {len(trace)} nodes, expected {self.n}"
            )
        out = []
        for v, reach in enumerate(trace):
            reach = tuple(sorted(int(u) for u in set(reach)))
            if any(not 0 <= u < self.n for u in reach):
                raise ValueError(f"reachability of node {v} leaves [0, {self.n})")
            if v not in reach:
                raise ValueError(f"node {v} missing from its own reachability")
            out.append(reach)
        return tuple(out)

    @property
    def generative(self):
        return self._graph is not None

    @property
    def num_realizations(self):
        return len(self.traces)

    def sample_realization(self, rng):
        if self.generative:
            from .dataio import single_cascade

            return single_cascade(self._graph, self._p, rng)
        return super().sample_realization(rng)

    def _resolve(self, z):
        if isinstance(z, (int, np.integer)):
            return self.traces[z]
        return self._check_trace(z)

    def _build_components(self, z):
        trace = self._resolve(z)
        groups = {}
        for reach in trace:
            groups[reach] = groups.get(reach, 0) + 1
        items = [
            (-count / self.n, reach) for reach, count in sorted(groups.items())
        ]
        return [ComplementPolynomial(self.n, 1.0, items)]

    def realization_key(self, z):
        if isinstance(z, (int, np.integer)):
            return int(z)
        return tuple(tuple(r) for r in z)

    def bias_bound(self, degree):
        return log1p_taylor_bound(degree)


# ---------------------------------------------------------------------
# FL: facility location
# ---------------------------------------------------------------------


class FacilityLocationObjective(StochasticObjective):
    """Customers (realizations) valuing facilities; coverage of the max.

    Per realization the facility weights are pre-sorted descending
    (stable, ties by index) and the max over the selected set is written
    as the telescoping sum over sorted prefixes, with an explicit zero
    sentinel after the last facility.
    """

    family = "FL"
    link = "log1p"

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 2:
            raise ValueError("weights must be (num_realizations, n)")
        super().__init__(weights.shape[1])
        if (weights < 0).any() or (weights > 1).any():
            raise ValueError("facility weights must lie in [0, 1]")
        self.weights = weights
        # Descending stable sort per realization.
        self.orders = np.stack(
            [
                np.lexsort((np.arange(self.n), -weights[zi]))
                for zi in range(weights.shape[0])
            ]
        ) if weights.shape[0] else np.zeros((0, self.n), dtype=np.int64)

    @property
    def num_realizations(self):
        return self.weights.shape[0]

    def _build_components(self, z):
        w = self.weights[z]
        order = self.orders[z]
        sorted_w = w[order]
        items = []
        prefix = []
        for rank in range(self.n):
            prefix.append(int(order[rank]))
            nxt = sorted_w[rank + 1] if rank + 1 < self.n else 0.0
            diff = sorted_w[rank] - nxt
            if diff != 0.0:
                items.append((-diff, tuple(sorted(prefix))))
        const = float(sorted_w[0]) if self.n else 0.0
        return [ComplementPolynomial(self.n, const, items)]

    def bias_bound(self, degree):
        return log1p_taylor_bound(degree)


# ---------------------------------------------------------------------
# CN: cache networks
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class CacheRequest:
    item: int
    path: tuple  # ordered node list, first node receives the request
    rate: float


class CacheNetworkObjective(StochasticObjective):
    """Per-edge queue-size gain of caching; realizations are edges.

    Ground-set variables are (node, item) placements flattened to
    ``node * catalogue_size + item``.  The load of an edge leaving the
    k-th node of a request's path survives only if none of the first k
    path nodes cache the item; the objective is the expected reduction
    of h(load) with h(s) = s / (1 - s), against the empty-cache load.
    """

    family = "CN"
    link = "geometric"

    def __init__(self, num_nodes, catalogue_size, edges, requests):
        self.num_nodes = int(num_nodes)
        self.catalogue_size = int(catalogue_size)
        super().__init__(self.num_nodes * self.catalogue_size)
        self.edges = []
        for u, v, mu in edges:
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise ValueError(f"edge ({u},{v}) leaves the node set")
            if mu <= 0:
                raise ValueError(f"edge ({u},{v}) has nonpositive service rate")
            self.edges.append((int(u), int(v), float(mu)))
        self.requests = []
        for req in requests:
            item, path, rate = req.item, tuple(req.path), req.rate
            if not 0 <= item < catalogue_size:
                raise ValueError(f"item {item} outside the catalogue")
            if rate <= 0:
                raise ValueError("request rates must be positive")
            if any(not 0 <= v < num_nodes for v in path):
                raise ValueError("request path leaves the node set")
            if len(set(path)) != len(path):
                raise ValueError("request paths must be simple")
            self.requests.append(CacheRequest(int(item), path, float(rate)))
        edge_pos = {(u, v): idx for idx, (u, v, _) in enumerate(self.edges)}
        for req in self.requests:
            for k in range(len(req.path) - 1):
                hop = (req.path[k], req.path[k + 1])
                if hop not in edge_pos:
                    raise ValueError(
                        f"request path hop {hop} is not a network edge"
                    )
        self.max_empty_load = max(
            (self._empty_load(z) for z in range(len(self.edges))),
            default=0.0,
        )
        if self.max_empty_load >= 1.0:
            raise ValueError(
                "stability violated: empty-cache load "
                f"{self.max_empty_load} >= 1"
            )

    def variable(self, node, item):
        return node * self.catalogue_size + item

    def _empty_load(self, z):
        u, v, mu = self.edges[z]
        total = 0.0
        for req in self.requests:
            for k in range(len(req.path) - 1):
                if req.path[k] == u and req.path[k + 1] == v:
                    total += req.rate / mu
        return total

    @property
    def num_realizations(self):
        return len(self.edges)

    def _build_components(self, z):
        u, v, mu = self.edges[z]
        items = []
        for req in self.requests:
            for k in range(len(req.path) - 1):
                if req.path[k] == u and req.path[k + 1] == v:
                    support = tuple(
                        sorted(
                            self.variable(req.path[j], req.item)
                            for j in range(k + 1)
                        )
                    )
                    items.append((req.rate / mu, support))
        return [ComplementPolynomial(self.n, 0.0, items)]

    def bias_bound(self, degree):
        return geometric_tail_bound(degree, self.max_empty_load)


FAMILIES = {
    "SM": SummarizationObjective,
    "IM": InfluenceObjective,
    "FL": FacilityLocationObjective,
    "CN": CacheNetworkObjective,
}
