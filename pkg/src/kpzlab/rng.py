"""Counter-based keyed randomness.

Every draw is a pure function of (seed, stream of integer keys): hash the
keys through a splitmix64-style finalizer chain, then map the 64-bit result
to the unit interval. No mutable generator state anywhere, so any site of
any field can be evaluated independently, in any order, on any worker.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

# odd constants from the splitmix64 reference finalizer plus golden-ratio
# increments; additions break the all-zero fixed point of the xor chain
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INC = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer (Python int path)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def hash_keys(seed: int, keys: Iterable[int]) -> int:
    """Hash an ordered key stream under a seed to one 64-bit word."""
    h = mix64((seed + _INC) & MASK64)
    for k in keys:
        h = mix64((h ^ (k & MASK64)) + _INC)
    return h


def derive_seed(seed: int, *indices: int) -> int:
    """Stable child seed for replica/stream `indices` under a master seed."""
    return hash_keys(seed, indices)


def unit_open(h: int) -> float:
    """Map a 64-bit word to the unit interval, symmetric about 1/2.

    Mathematically ((h >> 11) + 1/2) * 2^-53 lies in (0, 1); the top word
    rounds to 1.0 in float64, so downstream maps must tolerate u = 1.
    """
    return ((h >> 11) + 0.5) * 2.0**-53


# ---------------------------------------------------------------------------
# vectorized twins; must stay bit-identical to the scalar path


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def hash_keys_vec(seed: int, scalar_keys: Iterable[int],
                  key_arrays: Iterable[np.ndarray]) -> np.ndarray:
    """Vectorized hash_keys: scalar keys first, then per-element key arrays.

    Equivalent to hash_keys(seed, [*scalar_keys, k1[i], k2[i], ...]) for
    every element i of the broadcast shape of key_arrays.
    """
    h = mix64((seed + _INC) & MASK64)
    for k in scalar_keys:
        h = mix64((h ^ (k & MASK64)) + _INC)
    out = None
    with np.errstate(over="ignore"):
        for arr in key_arrays:
            a = np.asarray(arr, dtype=np.int64).astype(np.uint64)
            acc = (np.uint64(h) ^ a) if out is None else (out ^ a)
            out = _mix64_vec(acc + np.uint64(_INC))
    if out is None:
        return np.array(h, dtype=np.uint64)
    return out


def unit_open_vec(h: np.ndarray) -> np.ndarray:
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
