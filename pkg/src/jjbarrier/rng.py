"""Counter-based random streams keyed by integer coordinates.

Deterministic parallel sampling is built on the Philox-4x64 block cipher:
every 64-bit output word is a pure function of (key, counter), so a value
attached to logical coordinates (e.g. master seed, junction index, pixel
row, pixel column) is identical no matter how many workers evaluate the
stream or in which order.

Layout used here:

* ``key``   = 2x64 bits derived by hashing the caller's integer context
  (master seed, junction index, ...) with a splitmix64 chain,
* ``counter word 1`` = row index,
* ``counter word 0`` + lane = column index (Philox emits 4 lanes per
  counter tick, so column ``x`` is lane ``x % 4`` of block ``x // 4``).

Because a row is a counter stream, extending a row (or adding rows) keeps
all previously drawn coordinates bit-identical - refining a sampling mesh
only appends new draws.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

__all__ = [
    "derive_key",
    "derive_seed",
    "row_words",
    "word_at",
    "words_to_unit",
    "uniform_field",
    "uniform_at",
    "generator",
]

_MASK64 = (1 << 64) - 1
#: scale/offset mapping the top 53 bits of a word into the open interval (0, 1);
#: endpoints are excluded so inverse-CDF transforms stay finite.
_UNIT_SCALE = 2.0**-53
_UNIT_OFFSET = 2.0**-54


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_key(*context: int) -> np.ndarray:
    """Hash a tuple of integers into a 2x64-bit Philox key.

    Distinct context tuples give independent streams; the same tuple
    always gives the same key.
    """
    acc = 0
    for w in context:
        acc = _splitmix64(acc ^ (int(w) & _MASK64))
    k0 = _splitmix64(acc)
    k1 = _splitmix64(k0)
    return np.array([k0, k1], dtype=np.uint64)


def derive_seed(*context: int) -> int:
    """Hash a tuple of integers into a single 64-bit sub-seed."""
    acc = 0
    for w in context:
        acc = _splitmix64(acc ^ (int(w) & _MASK64))
    return _splitmix64(acc)


def row_words(key: np.ndarray, row: int, n: int) -> np.ndarray:
    """First ``n`` raw 64-bit words of the stream for one row."""
    bg = Philox(counter=np.array([0, int(row), 0, 0], dtype=np.uint64), key=key)
    return bg.random_raw(n)


def word_at(key: np.ndarray, row: int, col: int) -> int:
    """Single raw word at (row, col); agrees with ``row_words(key, row)[col]``."""
    bg = Philox(
        counter=np.array([int(col) // 4, int(row), 0, 0], dtype=np.uint64), key=key
    )
    return int(bg.random_raw(4)[int(col) % 4])


def words_to_unit(words) -> np.ndarray:
    """Map raw 64-bit words to doubles strictly inside (0, 1)."""
    w = np.asarray(words, dtype=np.uint64)
    return (w >> np.uint64(11)) * _UNIT_SCALE + _UNIT_OFFSET


def uniform_field(key: np.ndarray, n_rows: int, n_cols: int) -> np.ndarray:
    """(n_rows, n_cols) uniforms in (0, 1), coordinate-addressed."""
    out = np.empty((n_rows, n_cols), dtype=float)
    for y in range(n_rows):
        out[y] = words_to_unit(row_words(key, y, n_cols))
    return out


def uniform_at(key: np.ndarray, row: int, col: int) -> float:
    """Scalar oracle for a single coordinate of ``uniform_field``."""
    return float(words_to_unit(word_at(key, row, col)))


def standard_normal_field(key: np.ndarray, n_rows: int, n_cols: int) -> np.ndarray:
    """Coordinate-addressed standard normals via the inverse CDF.

    One word per value keeps the coordinate <-> draw mapping exact, which
    rejection-based normal samplers would break.
    """
    return ndtri(uniform_field(key, n_rows, n_cols))


def generator(*context: int) -> np.random.Generator:
    """A numpy Generator seeded from hashed context, for bulk vectorized
    draws where per-coordinate addressing is not required (noise images,
    synthetic surfaces)."""
    return np.random.Generator(Philox(key=derive_key(*context)))
