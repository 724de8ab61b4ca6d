"""Counter-based random streams.

Sample ``i`` of a stream reads Philox blocks starting at counter
``i * blocks``, keyed by ``(seed, stream, attempt)``.  Its draws are therefore
a pure function of those values and of ``i``, whatever the chunking, thread
count or call order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

MASK64 = (1 << 64) - 1
ATTEMPT_BITS = 20
CHUNK = 2048


class SampleStream:
    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & MASK64
        self.stream = int(stream)

    def _key(self, attempt: int):
        if not 0 <= attempt < (1 << ATTEMPT_BITS):
            raise ValueError(f"attempt {attempt} out of range")
        return [self.seed, ((self.stream << ATTEMPT_BITS) | attempt) & MASK64]

    def raw(self, start: int, count: int, words: int, attempt: int = 0) -> np.ndarray:
        """``(count, words)`` uint64 draws for samples ``start .. start+count-1``."""
        blocks = -(-words // 4)
        pos = start * blocks
        counter = np.array([pos & MASK64, pos >> 64, 0, 0], dtype=np.uint64)
        key = np.array(self._key(attempt), dtype=np.uint64)
        gen = np.random.Philox(key=key, counter=counter)
        out = gen.random_raw(count * blocks * 4).reshape(count, blocks * 4)
        return out[:, :words]

    def raw_at(self, indices, words: int, attempts) -> np.ndarray:
        """Like :meth:`raw` for arbitrary sample indices and per-sample attempts."""
        indices = np.asarray(indices, dtype=np.int64)
        attempts = np.broadcast_to(np.asarray(attempts, dtype=np.int64), indices.shape)
        out = np.empty((indices.size, words), dtype=np.uint64)
        for j, (i, a) in enumerate(zip(indices.tolist(), attempts.tolist())):
            out[j] = self.raw(i, 1, words, a)[0]
        return out

    def uniforms(self, start, count, k, attempt=0):
        return to_unit_interval(self.raw(start, count, k, attempt))

    def normals(self, start, count, k, attempt=0):
        return box_muller(self.raw(start, count, 2 * -(-k // 2), attempt), k)


def to_unit_interval(raw: np.ndarray) -> np.ndarray:
    """Map uint64 words to doubles in the open interval (0, 1)."""
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def box_muller(raw: np.ndarray, k: int) -> np.ndarray:
    u = to_unit_interval(raw)
    r = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    theta = 2.0 * math.pi * u[:, 1::2]
    z = np.empty((u.shape[0], u.shape[1]))
    z[:, 0::2] = r * np.cos(theta)
    z[:, 1::2] = r * np.sin(theta)
    return z[:, :k]


def normal_words(k: int) -> int:
    return 2 * -(-k // 2)


def chunked(n: int, fn, workers: int = 1, chunk: int = CHUNK):
    """Apply ``fn(start, stop)`` over fixed-size chunks of ``range(n)``.

    Chunk boundaries never depend on ``workers``; results come back in
    index order.
    """
    bounds = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    if workers <= 1 or len(bounds) <= 1:
        return [fn(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), bounds))
