"""Deterministic random streams.

Stream ``(seed, stream_id)`` is numpy's Philox counter-based generator keyed
by ``SeedSequence([seed, stream_id])``.  Both pieces are documented numpy
algorithms, so sequences reproduce across platforms and numpy versions that
keep them stable.
"""
import numpy as np

__all__ = ["rng", "spawn_seeds"]


def rng(seed, stream_id=0):
    """Independent generator for ``(seed, stream_id)``."""
    if seed is None:
        raise ValueError("a seed is required for reproducible streams")
    ss = np.random.SeedSequence([int(seed), int(stream_id)])
    return np.random.Generator(np.random.Philox(ss))


def spawn_seeds(seed, count, stream_id=0):
    """``count`` integer seeds derived from one stream (for per-instance generators)."""
    return rng(seed, stream_id).integers(0, 2**31 - 1, size=count).tolist()
