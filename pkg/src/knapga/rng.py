"""Portable seeded integer stream used by the instance generator.

Raw 64-bit words come from the PCG64 bit generator (O'Neill's PCG-XSL-RR 128/64)
seeded through numpy's ``SeedSequence``. Both algorithms are fixed and
published, and numpy keeps bit-generator streams stable across releases,
unlike the distribution methods on ``numpy.random.Generator``. Bounded
integers are drawn here by rejection sampling so the mapping from raw words
to values never depends on the numpy version.
"""

from __future__ import annotations

import numpy as np

_TWO64 = 1 << 64


class PortableRng:
    def __init__(self, seed: int):
        if not 0 <= seed < _TWO64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self._bitgen = np.random.PCG64(seed)

    def next_u64(self) -> int:
        return int(self._bitgen.random_raw())

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed interval ``[lo, hi]``, without modulo bias."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        limit = _TWO64 - (_TWO64 % span)
        while True:
            u = self.next_u64()
            if u < limit:
                return lo + u % span
