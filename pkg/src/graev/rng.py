"""Seeded randomness: every stream is Philox keyed by (seed, *labels)."""

import zlib

import numpy as np

GENERATOR_NAME = "numpy.random.Philox"


def _key(label) -> int:
    if isinstance(label, str):
        return zlib.crc32(label.encode("utf-8"))
    return int(label)


def stream(seed: int, *labels) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1)] + [_key(x) for x in labels])
    return np.random.Generator(np.random.Philox(ss))
