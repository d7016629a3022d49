"""Named random substreams derived from a single 64-bit seed.

Every source of randomness in the package draws from one of these streams so
that a run is fully reproduced by its seed: "init" feeds model
initialization (indexed by start), "starts" is reserved for multi-start
orchestration, "holdout" feeds the label hold-out draw, and "simulate" feeds
the synthetic-data generators (indexed by component).
"""

import numpy as np

_STREAMS = {"init": 0, "starts": 1, "holdout": 2, "simulate": 3}


def substream(seed, name, *key):
    """Generator for the named stream, optionally keyed (e.g. start index)."""
    if name not in _STREAMS:
        raise ValueError(f"unknown stream {name!r}; expected one of {sorted(_STREAMS)}")
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF, _STREAMS[name]]
    words.extend(int(k) for k in key)
    return np.random.default_rng(np.random.SeedSequence(words))
