"""Uniform and partition matroid constraints.

Provides independence testing, rank, exact linear maximization over the
matroid polytope (the direction-finding step of the continuous greedy
loop), and the JSON codec used inside instance files.
"""

import json

import numpy as np


class Matroid:
    """Immutable uniform or partition matroid on ground set [0, n).

    Uniform and partition kinds keep separate code paths on purpose; a
    uniform matroid must behave identically to its single-block
    partition encoding, and tests hold the two paths to that.
    """

    __slots__ = ("n", "kind", "k", "blocks", "caps", "_block_of")

    def __init__(self, n, kind, k=None, blocks=None, caps=None):
        self.n = int(n)
        self.kind = kind
        if kind == "uniform":
            if k is None or k < 0:
                raise ValueError("uniform matroid requires k >= 0")
            self.k = int(k)
            self.blocks = None
            self.caps = None
            self._block_of = None
        elif kind == "partition":
            if blocks is None or caps is None or len(blocks) != len(caps):
                raise ValueError(
                    "partition matroid requires parallel blocks and caps"
                )
            self.blocks = tuple(
                tuple(sorted(int(i) for i in block)) for block in blocks
            )
            self.caps = tuple(int(c) for c in caps)
            if any(c < 0 for c in self.caps):
                raise ValueError("block caps must be nonnegative")
            block_of = np.full(self.n, -1, dtype=np.int64)
            for b, block in enumerate(self.blocks):
                for i in block:
                    if not 0 <= i < self.n:
                        raise ValueError(
                            f"block element {i} out of range [0, {self.n})"
                        )
                    if block_of[i] != -1:
                        raise ValueError(
                            f"element {i} appears in more than one block"
                        )
                    block_of[i] = b
            if (block_of == -1).any():
                missing = int(np.argmax(block_of == -1))
                raise ValueError(
                    f"blocks do not cover the ground set (element {missing})"
                )
            self._block_of = block_of
            self.k = None
        else:
            raise ValueError(f"unknown matroid kind {kind!r}")

    # -- constructors -------------------------------------------------

    @classmethod
    def uniform(cls, n, k):
        return cls(n, "uniform", k=k)

    @classmethod
    def partition(cls, blocks, caps, n=None):
        if n is None:
            n = sum(len(b) for b in blocks)
        return cls(n, "partition", blocks=blocks, caps=caps)

    def __repr__(self):
        if self.kind == "uniform":
            return f"Matroid.uniform(n={self.n}, k={self.k})"
        return (
            f"Matroid.partition(n={self.n}, m={len(self.blocks)}, "
            f"caps={list(self.caps)})"
        )

    def __eq__(self, other):
        if not isinstance(other, Matroid):
            return NotImplemented
        return (
            self.n == other.n
            and self.kind == other.kind
            and self.k == other.k
            and self.blocks == other.blocks
            and self.caps == other.caps
        )

    # -- operations ---------------------------------------------------

    def _check_indices(self, s):
        for i in s:
            if not 0 <= i < self.n:
                raise ValueError(f"element {i} out of range [0, {self.n})")

    def is_independent(self, s):
        s = set(int(i) for i in s)
        self._check_indices(s)
        if self.kind == "uniform":
            return len(s) <= self.k
        counts = [0] * len(self.blocks)
        for i in s:
            counts[self._block_of[i]] += 1
        return all(c <= cap for c, cap in zip(counts, self.caps))

    def rank(self):
        if self.kind == "uniform":
            return min(self.k, self.n)
        return sum(
            min(cap, len(block)) for cap, block in zip(self.caps, self.blocks)
        )

    def linear_maximize(self, d):
        """Vertex of the matroid polytope maximizing the linear form d.

        Within each block the top-weight elements with strictly positive
        weight are chosen (the polytope is downward closed, so elements
        with d_i <= 0 are never selected); ties break to the lowest
        index for determinism.
        """
        d = np.asarray(d, dtype=np.float64)
        if d.shape != (self.n,):
            raise ValueError(f"weights have shape {d.shape}, expected ({self.n},)")
        v = np.zeros(self.n, dtype=np.int64)
        if self.kind == "uniform":
            chosen = self._top_positive(np.arange(self.n), d, self.k)
        else:
            chosen = []
            for block, cap in zip(self.blocks, self.caps):
                idx = np.asarray(block, dtype=np.int64)
                chosen.extend(self._top_positive(idx, d, cap))
        v[list(chosen)] = 1
        return v

    @staticmethod
    def _top_positive(indices, d, cap):
        weights = d[indices]
        positive = weights > 0.0
        indices = indices[positive]
        weights = weights[positive]
        if len(indices) == 0 or cap == 0:
            return []
        # Sort by descending weight, then ascending index.
        order = np.lexsort((indices, -weights))
        return indices[order[: min(cap, len(indices))]].tolist()

    # -- serialization ------------------------------------------------

    def to_json_dict(self):
        if self.kind == "uniform":
            return {"kind": "uniform", "k": self.k}
        return {
            "kind": "partition",
            "blocks": [list(b) for b in self.blocks],
            "caps": list(self.caps),
        }

    @classmethod
    def from_json_dict(cls, obj, n):
        kind = obj.get("kind")
        if kind == "uniform":
            return cls.uniform(n, obj["k"])
        if kind == "partition":
            return cls.partition(obj["blocks"], obj["caps"], n=n)
        raise ValueError(f"unknown matroid kind {kind!r}")

    def to_json(self):
        return json.dumps(self.to_json_dict())
