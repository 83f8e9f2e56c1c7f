"""Small numeric helpers shared across modules."""

import numpy as np

from .errors import InvalidInputError


class Certified(float):
    """A float carrying a certified additive error bound.

    Behaves exactly like ``float`` in arithmetic; ``.error`` is an upper
    bound on the distance between the carried value and the exact
    quantity (0.0 when the computation is exact).
    """

    def __new__(cls, value, error=0.0):
        obj = super().__new__(cls, value)
        obj.error = float(error)
        return obj

    def __repr__(self):
        return f"Certified({float(self)!r}, error={self.error!r})"


def as_float_array(values, name="values"):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be finite")
    return arr


def unit_rows(vectors, name="directions", tol=1e-12):
    """Return a copy of ``vectors`` with rows renormalized to unit length."""
    arr = as_float_array(vectors, name)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be a (k, n) array")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms < tol):
        raise InvalidInputError(f"{name} contains a (near-)zero vector")
    return arr / norms[:, None]


def canonical_signs(vectors):
    """Flip each row so its largest-magnitude component is positive.

    Deterministic antipodal representative: ties in magnitude resolve to the
    first index (np.argmax).  Used to collapse +-v pairs.
    """
    arr = np.array(vectors, dtype=float)
    idx = np.argmax(np.abs(arr), axis=1)
    signs = np.sign(arr[np.arange(len(arr)), idx])
    signs[signs == 0] = 1.0
    return arr * signs[:, None]


def dedupe_rows(vectors, tol=1e-10):
    """Deduplicate rows within Euclidean tolerance; keeps first occurrences.

    Sorts lexicographically and merges chains of consecutive near-equal rows,
    which is exact for the well-separated-or-coincident inputs that arise
    here.  Returns rows in their original relative order.
    """
    arr = np.asarray(vectors, dtype=float)
    if len(arr) == 0:
        return arr
    order = np.lexsort(arr.T[::-1])
    keep = np.ones(len(arr), dtype=bool)
    prev = order[0]
    for cur in order[1:]:
        if np.linalg.norm(arr[cur] - arr[prev]) < tol:
            keep[cur] = False
        else:
            prev = cur
    return arr[keep]
