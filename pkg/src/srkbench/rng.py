"""Counter-based random streams for reproducible parallel Monte Carlo.

The generator is Philox-4x32 with 10 rounds.  A uniform variate is a pure
function of three integers:

    u = uniform(seed, path, position)

The 64-bit master seed is the Philox key.  The 128-bit counter holds the
64-bit path index in its upper two words and the draw pair index in its
lower two words, so every path owns an independent, position-addressable
substream.  Results therefore never depend on block sizes, worker counts,
or the order in which paths are simulated.

Each Philox invocation yields four 32-bit words, combined into two 64-bit
values; draw ``j`` of a path consumes word pair ``j % 2`` of counter
``j // 2``.  Uniforms are mapped to the open interval (0, 1) via the top
53 bits, offset by half a lattice spacing, so that inverse-CDF transforms
never see an endpoint.
"""

from __future__ import annotations

import numpy as np

_MULT_0 = np.uint64(0xD2511F53)
_MULT_1 = np.uint64(0xCD9E8D57)

_MASK32 = np.uint64(0xFFFFFFFF)
_MASK64 = 0xFFFFFFFFFFFFFFFF
_SHIFT32 = np.uint64(32)
_SHIFT11 = np.uint64(11)
_INV53 = 2.0 ** -53


def _philox4x32_10(x0, x1, x2, x3, k0, k1):
    """Ten Philox-4x32 rounds over broadcast uint32 word arrays."""
    x0, x1, x2, x3 = np.broadcast_arrays(x0, x1, x2, x3)
    x0 = x0.astype(np.uint32, copy=True)
    x1 = x1.astype(np.uint32, copy=True)
    x2 = x2.astype(np.uint32, copy=True)
    x3 = x3.astype(np.uint32, copy=True)
    # key schedule: round r uses (k0 + r*bump0, k1 + r*bump1) mod 2^32
    keys = [
        (np.uint32((k0 + r * 0x9E3779B9) & 0xFFFFFFFF),
         np.uint32((k1 + r * 0xBB67AE85) & 0xFFFFFFFF))
        for r in range(10)
    ]
    for rk0, rk1 in keys:
        p0 = _MULT_0 * x0.astype(np.uint64)
        p1 = _MULT_1 * x2.astype(np.uint64)
        hi0 = (p0 >> _SHIFT32).astype(np.uint32)
        lo0 = p0.astype(np.uint32)
        hi1 = (p1 >> _SHIFT32).astype(np.uint32)
        lo1 = p1.astype(np.uint32)
        x0, x1, x2, x3 = hi1 ^ x1 ^ rk0, lo1, hi0 ^ x3 ^ rk1, lo0
    return x0, x1, x2, x3


def _split_key(seed):
    seed = int(seed) & _MASK64
    return seed & 0xFFFFFFFF, seed >> 32


def raw_words(seed, paths, pair_start, pair_count):
    """Philox output as uint64 values, two per counter.

    Returns an array of shape ``(len(paths), 2 * pair_count)`` holding the
    outputs for counters ``pair_start .. pair_start + pair_count - 1`` of
    each path's substream.
    """
    paths = np.atleast_1d(np.asarray(paths, dtype=np.uint64)).reshape(-1, 1)
    # add the offset in uint64 so counters wrap modulo 2^64
    pairs = np.arange(pair_count, dtype=np.uint64) + np.uint64(int(pair_start) & _MASK64)
    k0, k1 = _split_key(seed)
    w0, w1, w2, w3 = _philox4x32_10(
        (pairs & _MASK32).astype(np.uint32),
        (pairs >> _SHIFT32).astype(np.uint32),
        (paths & _MASK32).astype(np.uint32),
        (paths >> _SHIFT32).astype(np.uint32),
        k0,
        k1,
    )
    a = (w0.astype(np.uint64) << _SHIFT32) | w1.astype(np.uint64)
    b = (w2.astype(np.uint64) << _SHIFT32) | w3.astype(np.uint64)
    return np.stack([a, b], axis=-1).reshape(paths.shape[0], 2 * pair_count)


def uniforms(seed, paths, start, count):
    """Uniform draws ``start .. start + count - 1`` for each path.

    Returns float64 values in the open interval (0, 1) with shape
    ``(len(paths), count)``.
    """
    if count == 0:
        paths = np.atleast_1d(np.asarray(paths, dtype=np.uint64))
        return np.empty((paths.size, 0))
    first_pair = start >> 1
    last_pair = (start + count - 1) >> 1
    words = raw_words(seed, paths, first_pair, last_pair - first_pair + 1)
    offset = start - 2 * first_pair
    words = words[:, offset:offset + count]
    return ((words >> _SHIFT11).astype(np.float64) + 0.5) * _INV53


class PathStream:
    """Sequential cursor over one path's substream.

    ``take`` returns the next ``n`` uniforms and advances the position, so
    a consumer that draws a fixed number of variates per step sees exactly
    the same values as a vectorized driver addressing positions directly.
    """

    __slots__ = ("seed", "path", "position")

    def __init__(self, seed, path, position=0):
        self.seed = int(seed) & _MASK64
        self.path = int(path) & _MASK64
        self.position = int(position)

    def take(self, n):
        out = uniforms(self.seed, [self.path], self.position, n)[0]
        self.position += n
        return out

    def __repr__(self):
        return f"PathStream(seed={self.seed}, path={self.path}, position={self.position})"
