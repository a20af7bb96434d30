"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np

__all__ = ["check_filling", "check_hoppings", "check_probability", "make_rng"]


def check_filling(filling, n_sites: int) -> int:
    """Validate an electron count against a site count; returns it as int."""
    if not isinstance(filling, numbers.Integral):
        raise ValueError(f"filling must be an integer, got {filling!r}")
    n = int(filling)
    if not 0 <= n <= n_sites:
        raise ValueError(f"filling must be in 0..{n_sites}, got {n}")
    return n


def check_hoppings(lattice, values) -> np.ndarray:
    """Validate one finite hopping per lattice edge; returns a float array."""
    t = np.asarray(values, dtype=float)
    if t.shape != (lattice.n_edges,):
        raise ValueError(
            f"expected {lattice.n_edges} hoppings for {lattice.name}, "
            f"got shape {t.shape}"
        )
    if not np.isfinite(t).all():
        raise ValueError("hoppings must all be finite")
    return t


def check_probability(p, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p}")
    return p


def make_rng(seed) -> np.random.Generator:
    """64-bit integer seed -> numpy Generator (PCG64)."""
    if not isinstance(seed, numbers.Integral):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    return np.random.default_rng(int(seed))
