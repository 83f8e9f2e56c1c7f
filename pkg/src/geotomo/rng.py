"""Deterministic counter-based random numbers.

Measurement noise must be bitwise reproducible from (seed, index) alone,
and extending a measurement set may not disturb earlier draws.  We use the
splitmix64 output function as a counter-based generator: word t of stream
``seed`` is    mix64(mix64(seed) + GOLDEN * (t + 1)),
i.e. plain splitmix64 with random access by counter.  Each measurement i
consumes exactly two words (counters 2i and 2i+1), which feed the cosine
branch of the Box-Muller transform:

    z_i = sqrt(-2 ln u1) * cos(2 pi u2)

with u1, u2 built from the top 53 bits of each word, offset by half an ulp
so u1 > 0.  No generator state, no numpy Generator version dependence.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64


def mix64(x):
    """splitmix64 finalizer; accepts uint64 scalars or arrays."""
    # modular 64-bit arithmetic is the point; silence the overflow warning
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64)
        z = (z ^ (z >> _U64(30))) * _MIX1
        z = (z ^ (z >> _U64(27))) * _MIX2
        return z ^ (z >> _U64(31))


def stream_words(seed, counters):
    """Word at each counter position of the stream keyed by ``seed``."""
    with np.errstate(over="ignore"):
        base = mix64(_U64(int(seed) & 0xFFFFFFFFFFFFFFFF) + _GOLDEN)
        c = np.asarray(counters, dtype=np.uint64)
        return mix64(base + _GOLDEN * (c + _U64(1)))


def _uniform_open(words):
    # top 53 bits -> (0, 1), never exactly 0 or 1
    return ((words >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53


def gaussian(seed, count, start_index=0):
    """Standard normal draws for measurement indices start..start+count-1."""
    if count < 0 or start_index < 0:
        raise ValueError("count and start_index must be nonnegative")
    if count == 0:
        return np.zeros(0)
    i = np.arange(start_index, start_index + count, dtype=np.uint64)
    u1 = _uniform_open(stream_words(seed, i * _U64(2)))
    u2 = _uniform_open(stream_words(seed, i * _U64(2) + _U64(1)))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def derive_seed(base, *indices):
    """Deterministic child seed from a base seed and integer indices."""
    h = mix64(_U64(int(base) & 0xFFFFFFFFFFFFFFFF))
    for ix in indices:
        h = mix64(h ^ (_U64(int(ix) & 0xFFFFFFFFFFFFFFFF) + _GOLDEN))
    return int(h)
