"""Named random streams derived from one master seed.

Every stochastic subsystem draws from its own stream so that changing
one of them (e.g. swapping the gradient estimator, which consumes the
sample stream) leaves the others untouched.  In particular the sequence
of sampled realizations is identical across estimator choices for a
fixed master seed, which is what makes estimator comparisons paired.
"""

import numpy as np

# Registry of stream names -> stable spawn keys.  Append only; never
# renumber, or previously recorded runs stop being reproducible.
_STREAM_KEYS = {
    "realizations": 0,  # draws of the random instantiation z
    "samples": 1,       # Bernoulli draws inside the sampling estimator
    "rounding": 2,      # swap-rounding coins
    "reporting": 3,     # utility estimation (never feeds the optimizer)
}


class SeedStreams:
    """Factory of independent ``numpy.random.Generator`` streams."""

    def __init__(self, master_seed):
        self.master_seed = int(master_seed)

    def generator(self, name, index=0):
        """A fresh generator for stream ``name``.

        ``index`` sub-splits a stream (e.g. one sub-stream per seed in a
        sweep) without perturbing the other streams.
        """
        try:
            key = _STREAM_KEYS[name]
        except KeyError:
            raise ValueError(f"unknown stream name: {name!r}") from None
        ss = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(key, int(index))
        )
        return np.random.default_rng(ss)


def stream_names():
    return tuple(_STREAM_KEYS)
