"""Swap rounding of a convex combination of matroid vertices.

The fractional output of the continuous greedy loop is a weighted
average of independent sets.  Repeatedly merging the first two
components with weight-proportional coins yields one independent set
whose inclusion probabilities match the fractional coordinates.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class ConvexDecomposition:
    """Independent sets with positive weights summing to one."""

    vertices: list  # list of frozenset[int]
    weights: list

    @classmethod
    def from_trajectory(cls, trajectory):
        """Vertices v_t with weights 1/T, duplicates merged."""
        T = trajectory.iterations
        merged = {}
        for row in trajectory.rows:
            key = frozenset(row.v_support)
            merged[key] = merged.get(key, 0) + 1
        vertices, weights = [], []
        for key in sorted(merged, key=lambda s: tuple(sorted(s))):
            vertices.append(key)
            weights.append(merged[key] / T)
        return cls(vertices, weights)

    def validate(self, matroid):
        if not self.vertices:
            raise ValueError("decomposition has no vertices")
        if len(self.vertices) != len(self.weights):
            raise ValueError("vertices and weights differ in length")
        total = 0.0
        for vertex, weight in zip(self.vertices, self.weights):
            if weight <= 0:
                raise ValueError(f"nonpositive weight {weight}")
            total += weight
            if not matroid.is_independent(vertex):
                raise ValueError(
                    f"decomposition vertex {sorted(vertex)} is not independent"
                )
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, expected 1")

    def marginals(self, n):
        y = np.zeros(n)
        for vertex, weight in zip(self.vertices, self.weights):
            y[sorted(vertex)] += weight
        return y


def _blocks_of(matroid):
    if matroid.kind == "uniform":
        return [tuple(range(matroid.n))]
    return list(matroid.blocks)


def _merge_pair(matroid, set_a, weight_a, set_b, weight_b, rng):
    """Merge two independent sets into one, block by block.

    Within each block the two sets are first equalized in cardinality by
    topping up the smaller from the other's difference (feasible by the
    exchange property; for partition matroids this is exactly per-block
    top-up), then leftover mismatched pairs are resolved one at a time
    with a weight-proportional coin.
    """
    a = set(set_a)
    b = set(set_b)
    p_keep_a = weight_a / (weight_a + weight_b)
    for block in _blocks_of(matroid):
        block_set = set(block)
        a_blk = a & block_set
        b_blk = b & block_set
        while len(a_blk) < len(b_blk):
            extra = min(b_blk - a_blk)
            a.add(extra)
            a_blk.add(extra)
        while len(b_blk) < len(a_blk):
            extra = min(a_blk - b_blk)
            b.add(extra)
            b_blk.add(extra)
        while a_blk != b_blk:
            i = min(a_blk - b_blk)
            j = min(b_blk - a_blk)
            if rng.random() < p_keep_a:
                b.remove(j)
                b.add(i)
                b_blk.remove(j)
                b_blk.add(i)
            else:
                a.remove(i)
                a.add(j)
                a_blk.remove(i)
                a_blk.add(j)
    assert a == b
    return frozenset(a)


def swap_round(matroid, decomposition, rng):
    """One random independent set preserving expected marginals."""
    decomposition.validate(matroid)
    vertices = list(decomposition.vertices)
    weights = list(decomposition.weights)
    current, w = vertices[0], weights[0]
    for vertex, weight in zip(vertices[1:], weights[1:]):
        current = _merge_pair(matroid, current, w, vertex, weight, rng)
        w += weight
    if not matroid.is_independent(current):
        raise AssertionError("swap rounding produced a dependent set")
    return current
