"""Seeded random streams.

Every trial gets its own Philox (counter-based) stream keyed by
``SeedSequence([seed, trial])``, so trials can run in any order or in
parallel and still reproduce bit-for-bit.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def make_rng(seed: int, trial: int = 0, salt: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial, salt])))


def rand_int(rng: np.random.Generator, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] inclusive."""
    return int(rng.integers(lo, hi + 1))


def rand_nonzero_int(rng: np.random.Generator, height: int) -> int:
    while True:
        v = rand_int(rng, -height, height)
        if v:
            return v


def rand_fraction(rng: np.random.Generator, height: int = 1000) -> Fraction:
    return Fraction(rand_int(rng, -height, height), rand_int(rng, 1, height))


def rand_disk(rng: np.random.Generator, radius: float = 2.0) -> complex:
    """Uniform point of the closed disk |z| <= radius."""
    r = radius * np.sqrt(rng.random())
    a = 2 * np.pi * rng.random()
    return complex(r * np.cos(a), r * np.sin(a))


def rand_disk_avoiding(rng: np.random.Generator, avoid, radius: float = 2.0,
                       gap: float = 1e-3, max_tries: int = 1000) -> complex:
    for _ in range(max_tries):
        z = rand_disk(rng, radius)
        if all(abs(z - complex(a)) > gap for a in avoid):
            return z
    raise RuntimeError("could not sample a point away from the given set")
