"""Counter-based Gaussian streams.

Every block of draws is addressed by ``(seed, stream, tag, step)`` and built
from a fresh Philox generator, so the result never depends on the order in
which blocks are requested.  Inside a block the particle index selects the
row, and numpy fills rows sequentially, so particle ``i`` receives the same
increment whatever the total particle count is.
"""

import numpy as np

# tags separate independent uses of one (seed, stream) pair
TAG_INCREMENT = 0
TAG_BOOTSTRAP = 1
TAG_AUXILIARY = 2
TAG_SAMPLER = 3


def _as_key(stream):
    if isinstance(stream, (int, np.integer)):
        return (int(stream),)
    return tuple(int(s) for s in stream)


def generator(seed, *key):
    """Independent ``numpy.random.Generator`` addressed by ``(seed, *key)``."""
    if int(seed) < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


class BrownianDriver:
    """Brownian increments keyed by (seed, particle, step).

    Parameters
    ----------
    seed : int
        Master seed.
    stream : int or tuple of int
        Sub-stream, e.g. the index of a macro-replication.
    """

    def __init__(self, seed, stream=0):
        self.seed = int(seed)
        self.stream = _as_key(stream)

    def child(self, *sub):
        return BrownianDriver(self.seed, self.stream + tuple(int(s) for s in sub))

    def normals(self, step, n, d, tag=TAG_INCREMENT):
        """Standard normals of shape ``(n, d)`` for one time step."""
        return generator(self.seed, *self.stream, tag, step).standard_normal((n, d))

    def increments(self, step, n, d, dt):
        return np.sqrt(dt) * self.normals(step, n, d)

    def rng(self, tag, *key):
        """Auxiliary generator for resampling and sampler randomness."""
        return generator(self.seed, *self.stream, tag, *key)

    def __repr__(self):
        return f"BrownianDriver(seed={self.seed}, stream={self.stream})"
