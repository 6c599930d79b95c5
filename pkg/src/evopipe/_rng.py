"""Deterministic RNG derivation from integer key paths."""

from __future__ import annotations

import numpy as np

_MOD = 2**63


def spawn_rng(*keys: int) -> np.random.Generator:
    """Generator seeded from a tuple of integer keys.

    The same key path always yields the same stream, independent of call
    order or process layout; negative keys are folded into [0, 2^63).
    """
    return np.random.default_rng(np.random.SeedSequence([int(k) % _MOD for k in keys]))
