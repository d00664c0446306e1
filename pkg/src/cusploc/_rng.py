"""Counter-based random streams.

Every stochastic routine in the package takes an integer seed and derives
independent substreams from (seed, index...) tuples. Philox is counter
based, so streams with distinct key material are independent and a
replication's draws do not depend on how work is batched or on which
worker process runs it.
"""

from __future__ import annotations

import numpy as np


def rng_for(seed: int, *indices: int) -> np.random.Generator:
    """Generator for the substream addressed by (seed, *indices).

    The same tuple always yields the same stream, regardless of execution
    order, batching, or process boundaries.
    """
    ss = np.random.SeedSequence(entropy=(int(seed),) + tuple(int(i) for i in indices))
    return np.random.Generator(np.random.Philox(ss))
