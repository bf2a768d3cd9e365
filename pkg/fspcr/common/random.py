"""
Seeded random streams.

Every stochastic step draws from its own ``numpy.random.Generator`` derived from the master
seed plus a path of labels, e.g. ``stream(seed, "replicate", 3, "train")``. Streams depend only
on that path, never on the order in which work runs, so results do not change with the number
of workers.
"""
from typing import Union
import hashlib

import numpy

StreamKey = Union[int, str]


def _key_to_int(key: StreamKey) -> int:
    if isinstance(key, (int, numpy.integer)):
        if key < 0:
            raise ValueError("stream keys must be non-negative, got {}".format(key))
        return int(key)
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def seed_sequence(seed: int, *keys: StreamKey) -> numpy.random.SeedSequence:
    return numpy.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_to_int(k) for k in keys))


def stream(seed: int, *keys: StreamKey) -> numpy.random.Generator:
    """A PCG64 generator for the sub-stream ``keys`` of ``seed``."""
    return numpy.random.Generator(numpy.random.PCG64(seed_sequence(seed, *keys)))


def derive_seed(seed: int, *keys: StreamKey) -> int:
    """An integer seed for APIs (such as scikit-learn splitters) that take ``random_state``."""
    return int(seed_sequence(seed, *keys).generate_state(1, numpy.uint32)[0])
