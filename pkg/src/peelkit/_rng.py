"""Counter-based seed derivation for reproducible parallel replicates.

Replicate i of a run with 64-bit master seed m draws its own seed as
``mix64(m + GOLDEN * (i + 1))`` where ``mix64`` is the splitmix64
finalizer.  Every consumer (numpy generators at the Python level,
splitmix64 streams inside the numba kernels) derives from that one value,
so replicate i is reproducible in isolation and results are independent
of how replicates are scheduled across threads.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 finalizer; a fixed 64-bit bijection."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def replicate_seed(master: int, index: int) -> int:
    """Seed for replicate `index` under `master`; H(master, i) of the config contract."""
    return mix64((master + GOLDEN * (index + 1)) & MASK64)


def generator(master: int, index: int = 0) -> np.random.Generator:
    """numpy Generator for one replicate."""
    return np.random.Generator(np.random.PCG64(replicate_seed(master, index)))


class SplitMix64:
    """Pure-python splitmix64 stream; bit-compatible with the kernel RNG."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        # 53-bit mantissa in [0, 1)
        return (self.next_u64() >> 11) * 2.0 ** -53
