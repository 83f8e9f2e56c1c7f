"""Convex bodies and surface-area measures.

Three concrete body representations (vertex polytopes, support-vector
polytopes, zonotopes) plus finite atomic measures on the sphere, with the
surface-area-measure calculus connecting them: every full-dimensional
polytope has an atomic surface measure (facet normals weighted by facet
measure), an even measure has a projection body (a zonotope), and a
measure satisfying the closure and non-degeneracy conditions is the
surface measure of an essentially unique polytope, recovered here in 2D by
edge chaining and in 3D by a convex variational scheme.
"""

import json
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial import QhullError

from .directions import DirectionSequence, as_direction_sequence
from .errors import (
    ClosureError,
    ConvergenceError,
    DegenerateMeasureError,
    EvennessError,
    InvalidBodyError,
    InvalidInputError,
    PositiveHullError,
    SpanError,
    UnboundedPolytopeError,
    UnsupportedDimensionError,
)
from .numeric import as_float_array, canonical_signs, unit_rows

ATOM_MERGE_TOL = 1e-10
FEASIBILITY_TOL = 1e-9


def _extreme_points(points):
    """Reduce a point cloud to its extreme points, degenerate ranks included.

    For planar full-rank input the result is in counterclockwise order
    (the order scipy's hull reports), which the edge calculus relies on.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return pts
    if len(pts) > 1:
        # near-duplicate collapse keeps qhull happy on tiny inputs; round
        # only for grouping, keep original coordinates
        _, idx = np.unique(np.round(pts, 12), axis=0, return_index=True)
        pts = pts[np.sort(idx)]
    if len(pts) == 1:
        return pts
    center = pts.mean(axis=0)
    shifted = pts - center
    svals = np.linalg.svd(shifted, compute_uv=False)
    rank = int(np.sum(svals > 1e-10 * max(1.0, svals[0])))
    if rank == 0:
        return pts[:1]
    if rank == 1:
        _, _, vt = np.linalg.svd(shifted, full_matrices=False)
        t = shifted @ vt[0]
        lo, hi = np.argmin(t), np.argmax(t)
        return pts[[lo, hi]]
    if rank == pts.shape[1]:
        hull = ConvexHull(pts)
        return pts[hull.vertices]
    _, _, vt = np.linalg.svd(shifted, full_matrices=False)
    coords = shifted @ vt[:rank].T
    hull = ConvexHull(coords)
    return pts[hull.vertices]


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex polytope stored by its extreme points.

    Construction reduces an arbitrary point list to the extreme points of
    its convex hull; for 2D bodies vertices end up in counterclockwise
    order.  The empty polytope (from an infeasible halfspace intersection)
    is representable and reports is_empty.
    """

    vertices: np.ndarray

    def __post_init__(self):
        arr = as_float_array(self.vertices, "vertices")
        if arr.ndim != 2:
            raise InvalidInputError("vertices must be a (m, n) array")
        if arr.shape[1] < 2:
            raise UnsupportedDimensionError("bodies need dimension >= 2")
        if arr.shape[0] > 0:
            arr = _extreme_points(arr)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @classmethod
    def empty(cls, dims):
        return cls(np.zeros((0, dims)))

    @property
    def dims(self):
        return self.vertices.shape[1]

    @property
    def is_empty(self):
        return self.vertices.shape[0] == 0

    @property
    def is_full_dimensional(self):
        if len(self.vertices) <= self.dims:
            return False
        shifted = self.vertices - self.vertices.mean(axis=0)
        svals = np.linalg.svd(shifted, compute_uv=False)
        return bool(np.sum(svals > 1e-10 * max(1.0, svals[0])) == self.dims)

    @property
    def radius(self):
        return 0.0 if self.is_empty else float(np.linalg.norm(self.vertices, axis=1).max())

    def translate(self, t):
        return VPolytope(self.vertices + np.asarray(t, dtype=float))

    def scale(self, factor):
        if factor <= 0:
            raise InvalidInputError("scale factor must be positive")
        return VPolytope(self.vertices * float(factor))

    def centroid(self):
        """Center of mass of the solid body (vertex mean for degenerate ones)."""
        if self.is_empty:
            raise InvalidBodyError("empty polytope has no centroid")
        v = self.vertices
        if self.dims == 2 and len(v) >= 3 and self.is_full_dimensional:
            x, y = v[:, 0], v[:, 1]
            xn, yn = np.roll(x, -1), np.roll(y, -1)
            cross = x * yn - xn * y
            area = cross.sum() / 2.0
            cx = ((x + xn) * cross).sum() / (6.0 * area)
            cy = ((y + yn) * cross).sum() / (6.0 * area)
            return np.array([cx, cy])
        if self.dims == 3 and self.is_full_dimensional:
            hull = ConvexHull(v)
            ref = v.mean(axis=0)
            total = 0.0
            acc = np.zeros(3)
            for simplex in hull.simplices:
                a, b, c = v[simplex]
                # ref is interior, so every cone tetrahedron counts positively
                vol = abs(np.dot(a - ref, np.cross(b - ref, c - ref))) / 6.0
                acc += vol * (a + b + c + ref) / 4.0
                total += vol
            return acc / total
        return v.mean(axis=0)


@dataclass(frozen=True, eq=False)
class HPolytope:
    """Polytope as outward unit normals with support values."""

    normals: DirectionSequence
    supports: np.ndarray

    def __post_init__(self):
        normals = as_direction_sequence(self.normals)
        supports = as_float_array(self.supports, "supports").reshape(-1)
        if len(supports) != len(normals):
            raise InvalidInputError("supports length must match normals")
        supports.setflags(write=False)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "supports", supports)

    @property
    def dims(self):
        return self.normals.dims

    @cached_property
    def as_vpolytope(self):
        return polytope_from_supports(self)


@dataclass(frozen=True, eq=False)
class Zonotope:
    """Minkowski sum of centered segments x_j * [-v_j, v_j].

    Generators with half-length below 1e-14 are dropped on construction.
    The zonotope with no generators is the origin.
    """

    directions: np.ndarray
    half_lengths: np.ndarray

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] < 2:
            raise InvalidInputError("generator directions must be a (m, n) array")
        half = as_float_array(self.half_lengths, "half_lengths").reshape(-1)
        if len(half) != len(dirs):
            raise InvalidInputError("half_lengths length must match directions")
        if np.any(half < -1e-12):
            raise InvalidInputError("half_lengths must be nonnegative")
        keep = half >= 1e-14
        dirs = unit_rows(dirs[keep]) if np.any(keep) else dirs[keep]
        half = np.clip(half[keep], 0.0, None)
        dirs = np.ascontiguousarray(dirs)
        dirs.setflags(write=False)
        half.setflags(write=False)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "half_lengths", half)

    @classmethod
    def trivial(cls, dims):
        return cls(np.zeros((0, dims)), np.zeros(0))

    @property
    def dims(self):
        return self.directions.shape[1]

    @property
    def generator_count(self):
        return self.directions.shape[0]

    @property
    def radius(self):
        return float(self.half_lengths.sum())

    @property
    def is_full_dimensional(self):
        if self.generator_count == 0:
            return False
        return bool(np.linalg.matrix_rank(self.directions, tol=1e-10) == self.dims)

    def to_vpolytope(self):
        n = self.dims
        if self.generator_count == 0:
            return VPolytope(np.zeros((1, n)))
        w = self.half_lengths[:, None] * self.directions
        if n == 2:
            # orient generators into the upper half-plane and chain by angle
            flip = (w[:, 1] < 0) | ((w[:, 1] == 0) & (w[:, 0] < 0))
            w = np.where(flip[:, None], -w, w)
            order = np.argsort(np.arctan2(w[:, 1], w[:, 0]), kind="stable")
            chain = np.vstack([np.zeros(2), 2.0 * np.cumsum(w[order], axis=0)]) - w.sum(axis=0)
            return VPolytope(np.vstack([chain, -chain]))
        if n == 3:
            verts = np.zeros((1, 3))
            for row in w:
                verts = _extreme_points(np.vstack([verts + row, verts - row]))
            return VPolytope(verts)
        raise UnsupportedDimensionError("zonotope vertex form supports n in {2, 3}")


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finite nonnegative atomic measure on the unit sphere."""

    directions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] < 2:
            raise InvalidInputError("atom directions must be a (m, n) array")
        masses = as_float_array(self.masses, "masses").reshape(-1)
        if len(masses) != len(dirs):
            raise InvalidInputError("masses length must match directions")
        if np.any(masses < -1e-12):
            raise InvalidInputError("masses must be nonnegative")
        masses = np.clip(masses, 0.0, None)
        if len(dirs) > 0:
            dirs = unit_rows(dirs)
        dirs = np.ascontiguousarray(dirs)
        dirs.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def zero(cls, dims):
        return cls(np.zeros((0, dims)), np.zeros(0))

    @property
    def dims(self):
        return self.directions.shape[1]

    @property
    def atom_count(self):
        return self.directions.shape[0]

    @property
    def total_mass(self):
        return float(self.masses.sum())

    @property
    def weighted_sum(self):
        """Barycenter integral: sum of mass * direction."""
        if self.atom_count == 0:
            return np.zeros(self.dims)
        return self.masses @ self.directions

    def scale(self, factor):
        if factor < 0:
            raise InvalidInputError("scale factor must be nonnegative")
        return AtomicMeasure(self.directions, self.masses * float(factor))

    def merged(self, tol=ATOM_MERGE_TOL):
        """Merge atoms at coinciding directions (masses summed)."""
        dirs, masses = _merge_atoms(self.directions, self.masses, tol)
        return AtomicMeasure(dirs, masses)

    def _signed_pairing(self, tol=ATOM_MERGE_TOL):
        merged = self.merged(tol)
        if merged.atom_count == 0:
            return np.zeros((0, self.dims)), np.zeros(0), np.zeros(0)
        reps = canonical_signs(merged.directions)
        uniq, inverse = _group_rows(reps, tol)
        plus = np.zeros(len(uniq))
        minus = np.zeros(len(uniq))
        positive = np.einsum("ij,ij->i", merged.directions, reps) > 0
        for i in range(merged.atom_count):
            if positive[i]:
                plus[inverse[i]] += merged.masses[i]
            else:
                minus[inverse[i]] += merged.masses[i]
        return uniq, plus, minus

    def is_even(self, tol=ATOM_MERGE_TOL):
        """True when atoms pair antipodally with equal masses (within tol)."""
        _, plus, minus = self._signed_pairing(tol)
        return bool(np.all(np.abs(plus - minus) <= tol))


def _group_rows(rows, tol):
    """Assign rows within tol of each other to a common group.

    Returns (representatives, inverse) with representatives[inverse[i]]
    the group of row i.  Chain-merges along the lexicographic order, which
    is exact for well-separated-or-coincident inputs.
    """
    arr = np.asarray(rows, dtype=float)
    if len(arr) == 0:
        return arr, np.zeros(0, dtype=int)
    order = np.lexsort(arr.T[::-1])
    group_of = np.empty(len(arr), dtype=int)
    reps = [arr[order[0]]]
    group_of[order[0]] = 0
    for prev, cur in zip(order[:-1], order[1:]):
        if np.linalg.norm(arr[cur] - arr[prev]) < tol:
            group_of[cur] = group_of[prev]
        else:
            reps.append(arr[cur])
            group_of[cur] = len(reps) - 1
    return np.asarray(reps), group_of


def _merge_atoms(dirs, masses, tol):
    if len(dirs) == 0:
        return np.asarray(dirs, dtype=float), np.asarray(masses, dtype=float)
    reps, inverse = _group_rows(np.asarray(dirs, dtype=float), tol)
    merged = np.zeros(len(reps))
    np.add.at(merged, inverse, np.asarray(masses, dtype=float))
    return reps, merged


# ---------------------------------------------------------------------------
# support evaluation


def support_values(body, points):
    """h_body at each row of ``points`` (not necessarily unit vectors)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(body, VPolytope):
        if body.is_empty:
            raise InvalidBodyError("support of an empty polytope is undefined")
        return (pts @ body.vertices.T).max(axis=1)
    if isinstance(body, Zonotope):
        if body.generator_count == 0:
            return np.zeros(len(pts))
        return np.abs(pts @ body.directions.T) @ body.half_lengths
    if isinstance(body, HPolytope):
        return support_values(body.as_vpolytope, pts)
    raise InvalidInputError(f"unsupported body type {type(body).__name__}")


def support_function(body, direction):
    """Scalar support value max_{x in body} <x, direction>."""
    return float(support_values(body, np.asarray(direction, dtype=float)[None, :])[0])


# ---------------------------------------------------------------------------
# halfspace intersection


def _require_positive_hull(U):
    k, n = U.shape
    if np.linalg.matrix_rank(U, tol=1e-10) < n:
        raise PositiveHullError("normals do not span the ambient space")
    try:
        hull = ConvexHull(U)
    except QhullError as exc:
        raise PositiveHullError("normals are degenerate") from exc
    if hull.equations[:, -1].max() > -1e-10:
        raise PositiveHullError("normals do not positively span; intersection is unbounded")


def _candidate_vertices_2d(U, h):
    i, j = np.triu_indices(len(U), k=1)
    det = U[i, 0] * U[j, 1] - U[i, 1] * U[j, 0]
    ok = np.abs(det) > 1e-12
    i, j, det = i[ok], j[ok], det[ok]
    x = (h[i] * U[j, 1] - h[j] * U[i, 1]) / det
    y = (U[i, 0] * h[j] - U[j, 0] * h[i]) / det
    return np.column_stack([x, y])


def _candidate_vertices_3d(U, h):
    k = len(U)
    trips = np.array(list(combinations(range(k), 3)), dtype=np.intp)
    out = []
    for block in np.array_split(trips, max(1, len(trips) // 20000)):
        A = U[block]
        dets = np.abs(np.linalg.det(A))
        ok = dets > 1e-12
        if not np.any(ok):
            continue
        out.append(np.linalg.solve(A[ok], h[block][ok][..., None])[..., 0])
    if not out:
        return np.zeros((0, 3))
    return np.vstack(out)


def _feasible_points(U, h, pts):
    keep = []
    for block in np.array_split(pts, max(1, len(pts) * len(U) // 4_000_000)):
        if len(block) == 0:
            continue
        slack = block @ U.T - h
        tol = FEASIBILITY_TOL * np.maximum(1.0, np.abs(block).max(axis=1))
        keep.append(block[slack.max(axis=1) <= tol])
    if not keep:
        return np.zeros((0, U.shape[1]))
    return np.vstack(keep)


def polytope_from_supports(arg, supports=None):
    """Intersection of halfspaces {x . u_i <= h_i} as a vertex polytope.

    Accepts an HPolytope or (directions, supports).  Raises
    UnboundedPolytopeError when the normals do not positively span; an
    infeasible system yields the empty polytope (check ``is_empty``).
    """
    if isinstance(arg, HPolytope):
        U, h = arg.normals.vectors, arg.supports
    else:
        U = as_direction_sequence(arg).vectors
        h = as_float_array(supports, "supports").reshape(-1)
    if len(h) != len(U):
        raise InvalidInputError("supports length must match directions")
    n = U.shape[1]
    if n not in (2, 3):
        raise UnsupportedDimensionError("halfspace intersection supports n in {2, 3}")
    try:
        _require_positive_hull(U)
    except PositiveHullError as exc:
        raise UnboundedPolytopeError(str(exc)) from exc
    cand = _candidate_vertices_2d(U, h) if n == 2 else _candidate_vertices_3d(U, h)
    cand = _feasible_points(U, h, cand)
    if len(cand) == 0:
        return VPolytope.empty(n)
    return VPolytope(cand)


# ---------------------------------------------------------------------------
# surface area measure and friends


def surface_area_measure(body):
    """Atomic measure putting each facet's (n-1)-measure on its outward normal."""
    if isinstance(body, HPolytope):
        body = body.as_vpolytope
    if not isinstance(body, VPolytope):
        raise InvalidInputError("surface area measure needs a vertex polytope")
    if body.is_empty or not body.is_full_dimensional:
        raise InvalidBodyError("surface area measure needs a full-dimensional body")
    v = body.vertices
    if body.dims == 2:
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.linalg.norm(edges, axis=1)
        normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]
        dirs, masses = _merge_atoms(normals, lengths, ATOM_MERGE_TOL)
        return AtomicMeasure(dirs, masses)
    if body.dims == 3:
        hull = ConvexHull(v)
        eqs = np.round(hull.equations, 10)
        uniq, inverse = np.unique(eqs, axis=0, return_inverse=True)
        masses = np.zeros(len(uniq))
        for s, grp in zip(hull.simplices, inverse):
            a, b, c = v[s]
            masses[grp] += 0.5 * np.linalg.norm(np.cross(b - a, c - a))
        normals = unit_rows(uniq[:, :3])
        dirs, masses = _merge_atoms(normals, masses, ATOM_MERGE_TOL)
        return AtomicMeasure(dirs, masses)
    raise UnsupportedDimensionError("surface area measure supports n in {2, 3}")


def brightness_values(body, points):
    """(n-1)-volume of the body's shadow orthogonal to each direction.

    Cauchy's projection formula: half the integral of |u . v| against the
    surface area measure.
    """
    S = surface_area_measure(body)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return 0.5 * (np.abs(pts @ S.directions.T) @ S.masses)


def brightness(body, direction):
    return float(brightness_values(body, np.asarray(direction, dtype=float)[None, :])[0])


def measure_from_zonotope(z):
    """Surface measure of the polytope whose projection body is z: mass x_j
    at both +-v_j.  No spanning requirement; the trivial zonotope gives the
    zero measure."""
    dirs, half = _merge_atoms(canonical_signs(z.directions) if z.generator_count else z.directions,
                              z.half_lengths, ATOM_MERGE_TOL)
    if len(dirs) == 0:
        return AtomicMeasure.zero(z.dims)
    return AtomicMeasure(np.vstack([dirs, -dirs]), np.concatenate([half, half]))


def zonotope_surface_measure(z):
    """Even surface measure with mass x_j at +-v_j; requires spanning generators."""
    if not z.is_full_dimensional:
        raise SpanError("zonotope generators must span the ambient space")
    return measure_from_zonotope(z)


def projection_body(measure):
    """Zonotope whose support function is half the cosine transform of an
    even measure: generators (v_j, mass at v_j) over antipodal atom pairs."""
    if not isinstance(measure, AtomicMeasure):
        raise InvalidInputError("projection body needs an atomic measure")
    reps, plus, minus = measure._signed_pairing()
    if np.any(np.abs(plus - minus) > ATOM_MERGE_TOL):
        raise EvennessError("measure is not even: antipodal masses differ")
    return Zonotope(reps, plus) if len(reps) else Zonotope.trivial(measure.dims)


# ---------------------------------------------------------------------------
# Minkowski reconstruction


def _prepared_atoms(measure, closure_tol=1e-8):
    m = measure.merged()
    keep = m.masses > 1e-12 * max(1.0, m.total_mass)
    dirs, masses = m.directions[keep], m.masses[keep]
    if len(dirs) == 0:
        raise DegenerateMeasureError("measure has no mass")
    drift = np.linalg.norm(masses @ dirs)
    if drift > closure_tol:
        raise ClosureError(f"measure barycenter off origin by {drift:.3e}")
    return dirs, masses


def minkowski_reconstruct_2d(measure):
    """Polygon with the given surface area measure, centroid at the origin.

    Edges are chained in increasing normal-angle order; closure of the
    edge cycle is exactly the barycenter condition on the measure.
    """
    if measure.dims != 2:
        raise UnsupportedDimensionError("expected a measure on the circle")
    dirs, masses = _prepared_atoms(measure)
    if np.linalg.matrix_rank(dirs, tol=1e-10) < 2:
        raise DegenerateMeasureError("atoms concentrated on one line; body is degenerate")
    ang = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2.0 * np.pi)
    order = np.argsort(ang, kind="stable")
    # edge vector for outward normal u is mass * rot90(u)
    steps = masses[order, None] * np.column_stack([-dirs[order, 1], dirs[order, 0]])
    verts = np.vstack([np.zeros(2), np.cumsum(steps, axis=0)[:-1]])
    poly = VPolytope(verts)
    return poly.translate(-poly.centroid())


def _hpoly_geometry(U, h):
    """Hull geometry of {x . u_i <= h_i} with areas tied back to constraints.

    Returns (points, hull, volume, areas, atom_of_simplex); hull is None
    and volume 0 when the intersection is empty or lower-dimensional.
    """
    cand = _feasible_points(U, h, _candidate_vertices_3d(U, h))
    if len(cand) < 4:
        return cand, None, 0.0, np.zeros(len(U)), None
    try:
        hull = ConvexHull(cand)
    except QhullError:
        return cand, None, 0.0, np.zeros(len(U)), None
    areas = np.zeros(len(U))
    atom_of_simplex = np.argmax(hull.equations[:, :3] @ U.T, axis=1)
    for s, atom in zip(hull.simplices, atom_of_simplex):
        a, b, c = cand[s]
        areas[atom] += 0.5 * np.linalg.norm(np.cross(b - a, c - a))
    return cand, hull, float(hull.volume), areas, atom_of_simplex


def _area_jacobian(U, pts, hull, atom_of_simplex):
    """Exact Jacobian dA_i/dh_j of facet areas in the support values.

    Adjacent facets i, j sharing an edge of length L satisfy
    dA_i/dh_j = L / |u_i x u_j|; the diagonal follows from translation
    invariance of areas (sum_j dA_i/dh_j u_j = 0, dotted with u_i).
    """
    k = len(U)
    vsets = [set() for _ in range(k)]
    for s, atom in zip(hull.simplices, atom_of_simplex):
        vsets[atom].update(int(x) for x in s)
    present = sorted(set(int(a) for a in atom_of_simplex))
    J = np.zeros((k, k))
    for a, i in enumerate(present):
        for j in present[a + 1:]:
            common = sorted(vsets[i] & vsets[j])
            if len(common) < 2:
                continue
            cpts = pts[common]
            diff = cpts[None, :, :] - cpts[:, None, :]
            length = math.sqrt(float((diff * diff).sum(axis=-1).max()))
            sine = np.linalg.norm(np.cross(U[i], U[j]))
            if sine < 1e-12:
                continue
            J[i, j] = J[j, i] = length / sine
    dots = U @ U.T
    for i in present:
        J[i, i] = -float(J[i] @ dots[i])
    return J


def minkowski_reconstruct_3d(measure, max_evals=10000, tol=1e-10):
    """Polytope in R^3 with the given surface area measure, centroid at o.

    Minimizes sum_j m_j h_j - log V(P(h)) (the constrained-volume problem
    in penalized form; gradient m - A(h)/V vanishes exactly when facet
    areas are proportional to the target masses), then rescales so areas
    match.  Damped Newton with the exact area Jacobian; min-norm steps
    absorb the translation null space.
    """
    if measure.dims != 3:
        raise UnsupportedDimensionError("expected a measure on the 2-sphere")
    dirs, masses = _prepared_atoms(measure)
    if np.linalg.matrix_rank(dirs, tol=1e-10) < 3:
        raise DegenerateMeasureError("atoms concentrated on a great circle; body is degenerate")
    total = masses.sum()
    target = masses * (4.0 * np.pi / total)  # unit-sphere scale for conditioning

    evals = 0

    def geometry(h):
        nonlocal evals
        evals += 1
        if evals > max_evals:
            raise ConvergenceError("volume-functional evaluation budget exhausted")
        return _hpoly_geometry(dirs, h)

    h = np.ones(len(dirs))
    pts, hull, vol, areas, atom_of = geometry(h)
    if vol <= 0:
        raise DegenerateMeasureError("initial polytope degenerate; atoms ill-posed")
    g = target - areas / vol
    phi = target @ h - math.log(vol)
    slow = 0
    for _ in range(120):
        if np.abs(g).max() <= tol * max(1.0, target.max()):
            break
        JA = _area_jacobian(dirs, pts, hull, atom_of)
        # Hessian of the functional: -(dA/dh)/V + A A^T / V^2
        H = -JA / vol + np.outer(areas, areas) / (vol * vol)
        H = 0.5 * (H + H.T)
        s, *_ = np.linalg.lstsq(H, -g, rcond=None)
        alpha = 1.0
        accepted = False
        gnorm = np.linalg.norm(g)
        slope = float(g @ s)
        for _ in range(40):
            h_try = h + alpha * s
            pts_t, hull_t, vol_t, areas_t, atom_t = geometry(h_try)
            # reject steps that lose a facet or leave the feasible cone
            if vol_t > 0 and np.all(areas_t > 1e-14):
                phi_t = target @ h_try - math.log(vol_t)
                g_t = target - areas_t / vol_t
                if phi_t <= phi + 1e-4 * alpha * slope or np.linalg.norm(g_t) <= (1 - 0.25 * alpha) * gnorm:
                    h, phi, g = h_try, phi_t, g_t
                    pts, hull, vol, areas, atom_of = pts_t, hull_t, vol_t, areas_t, atom_t
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            break
        if np.abs(g).max() <= 1e-7 * target.max():
            break  # an order inside the acceptance gate; stop polishing
        # a full Newton step that barely moves means the area noise floor,
        # not slow damped progress
        slow = slow + 1 if alpha >= 0.99 and np.linalg.norm(g) > 0.9 * gnorm else 0
        if slow >= 2:
            break
    rel = np.abs(areas / vol - target).max() / target.max()
    if rel > 1e-6:
        raise ConvergenceError(
            f"facet areas off target by relative {rel:.3e}", residual=rel
        )
    # areas currently equal vol * target; scale so they equal the original masses
    factor = math.sqrt(total / (4.0 * np.pi * vol))
    poly = VPolytope(pts[hull.vertices] * factor)
    return poly.translate(-poly.centroid())


def minkowski_reconstruct(measure, **kwargs):
    """Dimension dispatch for the Minkowski reconstructions."""
    if measure.dims == 2:
        return minkowski_reconstruct_2d(measure)
    if measure.dims == 3:
        return minkowski_reconstruct_3d(measure, **kwargs)
    raise UnsupportedDimensionError("Minkowski reconstruction supports n in {2, 3}")


# ---------------------------------------------------------------------------
# body file I/O


def body_payload(obj):
    """JSON-ready dict {dims, kind, data} for a body or measure."""
    if isinstance(obj, VPolytope):
        kind, rows = "vpolytope", obj.vertices
    elif isinstance(obj, Zonotope):
        kind = "zonotope"
        rows = np.column_stack([obj.directions, obj.half_lengths])
    elif isinstance(obj, AtomicMeasure):
        kind = "measure"
        rows = np.column_stack([obj.directions, obj.masses])
    else:
        raise InvalidInputError(f"cannot serialize {type(obj).__name__}")
    return {"dims": int(obj.dims), "kind": kind, "data": [float(x) for x in np.ravel(rows)]}


def body_from_payload(payload, context="body payload"):
    """Rebuild a body or measure from a {dims, kind, data} dict."""
    try:
        dims = int(payload["dims"])
        kind = payload["kind"]
        data = np.asarray(payload["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed {context}: {exc}") from exc
    if dims < 2:
        raise InvalidInputError("body dims must be >= 2")
    width = {"vpolytope": dims, "zonotope": dims + 1, "measure": dims + 1}.get(kind)
    if width is None:
        raise InvalidInputError(f"unknown body kind {kind!r}")
    if data.size % width != 0:
        raise InvalidInputError(f"body data length not a multiple of {width}")
    rows = data.reshape(-1, width)
    if kind == "vpolytope":
        return VPolytope(rows)
    if kind == "zonotope":
        if len(rows) == 0:
            return Zonotope.trivial(dims)
        return Zonotope(rows[:, :dims], rows[:, dims])
    if len(rows) == 0:
        return AtomicMeasure.zero(dims)
    return AtomicMeasure(rows[:, :dims], rows[:, dims])


def save_body(path, obj):
    """Write a body or measure as JSON: {dims, kind, data} with flat data rows."""
    payload = body_payload(obj)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_body(path):
    """Read a body JSON written by save_body, validating invariants."""
    with open(path) as fh:
        payload = json.load(fh)
    return body_from_payload(payload, context=f"body file {path}")
