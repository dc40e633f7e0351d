"""Counter-based random streams.

A trajectory's noise depends only on ``(master_seed, trajectory_index)``: the
Philox key is exactly that pair, so results do not depend on which worker runs
which trajectory or in what order.
"""
from __future__ import annotations

import numpy as np

_UINT64_MAX = 2**64 - 1


def trajectory_stream(master_seed: int, trajectory_index: int) -> np.random.Generator:
    if not 0 <= master_seed <= _UINT64_MAX:
        raise ValueError(f"master_seed must fit in 64 unsigned bits, got {master_seed}")
    if not 0 <= trajectory_index <= _UINT64_MAX:
        raise ValueError(f"trajectory_index must be non-negative, got {trajectory_index}")
    key = np.array([master_seed, trajectory_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def complex_normals(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Complex normals with E|z|^2 = 1 (independent real/imag parts of variance 1/2)."""
    parts = rng.standard_normal((2, *shape))
    return (parts[0] + 1j * parts[1]) * np.sqrt(0.5)
