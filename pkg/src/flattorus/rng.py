"""Seeded generators with independent substreams.

A stream is identified by ``(seed, stream_index)``; the same pair always
yields the same PCG64 sequence, independent of how many other streams exist.
"""
import numpy as np


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def shard_sizes(n: int, shards: int) -> list[int]:
    if shards < 1:
        raise ValueError("need at least one shard")
    base, extra = divmod(n, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]
