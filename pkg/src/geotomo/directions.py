"""Direction sequences on the unit sphere.

Unit vectors are plain numpy rows; DirectionSequence wraps a read-only
(k, n) array and renormalizes on construction.  The module provides the
deterministic measurement designs (equally spaced circles, eps-nets, the
stacked-net sequence whose prefixes have spread O(k^{-1/(n-1)})) together
with the quality functionals used to analyze them: spread (max distance
from the sphere to the set), spherical Voronoi cell measures, antipodal
symmetrization, and the node set (directions orthogonal to input pairs).
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateDirectionError,
    InvalidInputError,
    SpanError,
    UnsupportedDimensionError,
)
from .numeric import Certified, as_float_array, canonical_signs, dedupe_rows, unit_rows

SPHERE_MEASURE = {2: 2.0 * np.pi, 3: 4.0 * np.pi}

# chordal tolerance below which two directions count as duplicates
DUPLICATE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DirectionSequence:
    """Finite ordered sequence of unit vectors in R^n, n >= 2.

    Rows are renormalized to unit length on construction and the backing
    array is marked read-only, so instances are safely shareable.
    """

    vectors: np.ndarray

    def __post_init__(self):
        arr = unit_rows(self.vectors)
        if arr.shape[1] < 2:
            raise UnsupportedDimensionError("directions need dimension >= 2")
        if arr.shape[0] < 1:
            raise InvalidInputError("direction sequence must be nonempty")
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

    @property
    def dims(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    @property
    def angles(self):
        """Angles in [0, 2*pi) for 2D sequences."""
        if self.dims != 2:
            raise UnsupportedDimensionError("angles are defined for n = 2 only")
        return np.mod(np.arctan2(self.vectors[:, 1], self.vectors[:, 0]), 2.0 * np.pi)

    @classmethod
    def from_angles(cls, angles):
        a = as_float_array(angles, "angles")
        return cls(np.column_stack([np.cos(a), np.sin(a)]))


def as_direction_sequence(dirs):
    if isinstance(dirs, DirectionSequence):
        return dirs
    return DirectionSequence(np.asarray(dirs, dtype=float))


def equally_spaced_2d(count, offset=0.0):
    """count angles offset + 2*pi*j/count, j = 0..count-1."""
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    return DirectionSequence.from_angles(offset + 2.0 * np.pi * np.arange(count) / count)


def half_circle_2d(count, offset=0.0):
    """count angles offset + pi*j/count: the even-function design in 2D."""
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    return DirectionSequence.from_angles(offset + np.pi * np.arange(count) / count)


def _net_points(n, eps):
    # n = 2: equally spaced with full-gap chord <= eps, i.e. gap <= 2 asin(eps/2)
    if n == 2:
        gap = 2.0 * math.asin(min(eps, 2.0) / 2.0)
        m = max(1, math.ceil(2.0 * math.pi / gap))
        a = 2.0 * np.pi * np.arange(m) / m
        return np.column_stack([np.cos(a), np.sin(a)])
    # n >= 3: latitude bands of half-width beta <= eps/2; each ring carries a
    # sub-net of chordal radius (eps - beta)/sin(theta) in S^{n-2}, so any
    # point is within beta (meridian chord) + (eps - beta) (ring chord).
    bands = math.ceil(math.pi / eps)
    beta = math.pi / (2.0 * bands)
    rows = []
    for j in range(bands):
        theta = (2 * j + 1) * beta
        s, c = math.sin(theta), math.cos(theta)
        radius = (eps - beta) / s
        if radius >= 2.0:
            ring = np.zeros((1, n - 1))
            ring[0, 0] = 1.0
        else:
            ring = _net_points(n - 1, radius)
        block = np.empty((len(ring), n))
        block[:, 0] = c
        block[:, 1:] = s * ring
        rows.append(block)
    return np.vstack(rows)


def epsilon_net(dims, eps):
    """Deterministic eps-net of S^{dims-1} in the chordal metric.

    Every unit vector lies within chordal distance eps of some element;
    the size is O(eps^{1-dims}).
    """
    if dims < 2:
        raise UnsupportedDimensionError("dims must be >= 2")
    if not (0.0 < eps <= 2.0):
        raise InvalidInputError("eps must lie in (0, 2]")
    return DirectionSequence(_net_points(dims, eps))


def _farthest_point_order(points):
    # Greedy farthest-point ordering: start at the lexicographically
    # smallest point, then repeatedly append the point maximizing the
    # minimum distance to everything chosen so far (first index wins
    # ties).  Prefixes of the result spread over the sphere instead of
    # clustering, so even partial nets positively span R^n.
    order = np.empty(len(points), dtype=int)
    start = int(np.lexsort(points.T[::-1])[0])
    order[0] = start
    mind = np.linalg.norm(points - points[start], axis=1)
    mind[start] = -1.0
    for i in range(1, len(points)):
        nxt = int(np.argmax(mind))
        order[i] = nxt
        np.minimum(mind, np.linalg.norm(points - points[nxt], axis=1), out=mind)
        mind[nxt] = -1.0
    return points[order]


def stacked_net_sequence(dims, count):
    """First ``count`` elements of the concatenated 2^-m nets, m = 1, 2, ...

    Each net is put in greedy farthest-point order before stacking, so
    every prefix spreads over the sphere.  Prefixes of the sequence have
    spread <= C * count^{-1/(dims-1)}.
    """
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    if dims < 2:
        raise UnsupportedDimensionError("dims must be >= 2")
    chunks = []
    total = 0
    m = 1
    while total < count:
        net = _farthest_point_order(_net_points(dims, 2.0**-m))
        chunks.append(net)
        total += len(net)
        m += 1
    return DirectionSequence(np.vstack(chunks)[:count])


def _sorted_gaps(angles):
    a = np.sort(np.mod(angles, 2.0 * np.pi))
    gaps = np.diff(a, append=a[0] + 2.0 * np.pi)
    return a, gaps


def spread(dirs, eval_eps=0.02):
    """Max over the sphere of the chordal distance to the nearest element.

    n = 2: exact via sorted angular gaps (worst point sits mid-gap, chord
    2 sin(g/4)).  n >= 3: evaluated on an eps-net of certified covering
    radius ``eval_eps``; the return value is a Certified float whose
    ``.error`` bounds the gap to the true spread (the distance-to-set
    function is 1-Lipschitz).
    """
    ds = as_direction_sequence(dirs)
    if ds.dims == 2:
        _, gaps = _sorted_gaps(ds.angles)
        return Certified(2.0 * math.sin(gaps.max() / 4.0), 0.0)
    net = epsilon_net(ds.dims, eval_eps).vectors
    worst = 0.0
    for block in np.array_split(net, max(1, len(net) // 4096)):
        d2 = np.maximum(2.0 - 2.0 * block @ ds.vectors.T, 0.0)
        worst = max(worst, float(d2.min(axis=1).max()))
    return Certified(math.sqrt(worst), eval_eps)


def symmetrize(dirs):
    """Interleave each direction with its antipode: u_1, -u_1, u_2, -u_2, ..."""
    v = as_direction_sequence(dirs).vectors
    out = np.empty((2 * len(v), v.shape[1]))
    out[0::2] = v
    out[1::2] = -v
    return DirectionSequence(out)


def symmetrized_spread(dirs, eval_eps=0.02):
    """Spread of the symmetrized sequence."""
    return spread(symmetrize(dirs), eval_eps=eval_eps)


def _check_duplicates(vectors):
    if len(dedupe_rows(vectors, DUPLICATE_TOL)) != len(vectors):
        raise DuplicateDirectionError("directions contain duplicates within 1e-10")


def _lune_measures(vectors):
    # all directions on one great circle: cells are lunes of area 2*width
    _, _, vt = np.linalg.svd(vectors)
    plane = vectors @ vt[:2].T
    az = np.arctan2(plane[:, 1], plane[:, 0])
    order = np.argsort(az)
    a = az[order]
    gaps = np.diff(a, append=a[0] + 2.0 * np.pi)
    widths = 0.5 * (gaps + np.roll(gaps, 1))
    out = np.empty(len(vectors))
    out[order] = 2.0 * widths
    return out


def _wedge_measures(vectors):
    # exactly three spanning directions: cell i is the intersection of two
    # hemispheres, a lune of dihedral angle pi - angle(a, b)
    out = np.empty(3)
    for i in range(3):
        j, l = (i + 1) % 3, (i + 2) % 3
        a = vectors[i] - vectors[j]
        b = vectors[i] - vectors[l]
        cosang = np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
        out[i] = 2.0 * (np.pi - math.acos(np.clip(cosang, -1.0, 1.0)))
    return out


def voronoi_cell_measures(dirs):
    """Surface measure of each direction's spherical Voronoi cell.

    n = 2: arc lengths; n = 3: spherical polygon areas.  Cells partition
    the sphere, so the values sum to its total measure.
    """
    ds = as_direction_sequence(dirs)
    v = ds.vectors
    _check_duplicates(v)
    if ds.dims == 2:
        if len(v) == 1:
            return np.array([2.0 * np.pi])
        _, gaps = _sorted_gaps(ds.angles)
        order = np.argsort(np.mod(ds.angles, 2.0 * np.pi), kind="stable")
        arcs = 0.5 * (gaps + np.roll(gaps, 1))
        out = np.empty(len(v))
        out[order] = arcs
        return out
    if ds.dims == 3:
        if len(v) == 1:
            return np.array([4.0 * np.pi])
        rank = np.linalg.matrix_rank(v, tol=1e-10)
        if rank == 1:
            # two antipodal directions: the bisecting great circle splits
            # the sphere into hemispheres
            return np.array([2.0 * np.pi, 2.0 * np.pi])
        if rank == 2:
            return _lune_measures(v)
        if len(v) == 3:
            return _wedge_measures(v)
        from scipy.spatial import SphericalVoronoi

        sv = SphericalVoronoi(v, radius=1.0)
        return sv.calculate_areas()
    raise UnsupportedDimensionError("Voronoi cell measures support n in {2, 3}")


def voronoi_max_measure(dirs):
    """Largest spherical Voronoi cell measure among the directions."""
    return float(voronoi_cell_measures(dirs).max())


@dataclass(frozen=True)
class SpreadStats:
    """Summary of a direction sequence's covering quality."""

    spread: float
    max_voronoi_measure: float
    symmetric: bool


def is_symmetric(dirs, tol=DUPLICATE_TOL):
    """True when the sequence is closed under the antipodal map."""
    v = as_direction_sequence(dirs).vectors
    d2 = 2.0 + 2.0 * (v @ v.T)  # squared distance between v_i and -v_j
    return bool(np.all(d2.min(axis=1) < tol * tol))


def spread_stats(dirs, eval_eps=0.02):
    ds = as_direction_sequence(dirs)
    return SpreadStats(
        spread=spread(ds, eval_eps=eval_eps),
        max_voronoi_measure=voronoi_max_measure(ds),
        symmetric=is_symmetric(ds),
    )


def nodes(dirs):
    """Unit vectors orthogonal to the input directions (n = 2) or to pairs
    of them (n = 3), with both signs, deduplicated within 1e-10.

    These are the only directions a polytope's projection-body generators
    can take when its shadows are pinned at the input directions.
    """
    ds = as_direction_sequence(dirs)
    v = ds.vectors
    if ds.dims == 2:
        if np.linalg.matrix_rank(v, tol=1e-10) < 2:
            raise SpanError("directions must span the plane")
        reps = canonical_signs(np.column_stack([-v[:, 1], v[:, 0]]))
    elif ds.dims == 3:
        if np.linalg.matrix_rank(v, tol=1e-10) < 3:
            raise SpanError("directions must span R^3")
        iu = np.triu_indices(len(v), k=1)
        cross = np.cross(v[iu[0]], v[iu[1]])
        norms = np.linalg.norm(cross, axis=1)
        keep = norms >= 1e-8  # near-parallel pairs contribute no node
        if not np.any(keep):
            raise SpanError("no direction pair is in general position")
        reps = canonical_signs(cross[keep] / norms[keep, None])
    else:
        raise UnsupportedDimensionError("nodes support n in {2, 3}")
    reps = dedupe_rows(reps, DUPLICATE_TOL)
    return DirectionSequence(np.vstack([reps, -reps]))


def node_representatives(dirs):
    """One representative per antipodal node pair (first half of nodes())."""
    full = nodes(dirs).vectors
    return DirectionSequence(full[: len(full) // 2])


def save_directions(path, dirs):
    """Write one direction per line as comma-separated float components."""
    v = as_direction_sequence(dirs).vectors
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in v:
            writer.writerow([repr(float(x)) for x in row])


def load_directions(path):
    """Read a direction CSV written by save_directions (rows renormalized)."""
    rows = []
    with open(path, newline="") as fh:
        for line in csv.reader(fh):
            if not line:
                continue
            try:
                rows.append([float(x) for x in line])
            except ValueError as exc:
                raise InvalidInputError(f"non-numeric entry in {path}: {exc}") from None
    if not rows:
        raise InvalidInputError(f"no directions in {path}")
    return DirectionSequence(np.asarray(rows))
