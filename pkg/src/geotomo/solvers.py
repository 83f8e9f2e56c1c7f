"""Constrained least-squares kernels for support and brightness fitting.

Two workhorses.  The consistency-constrained fit projects noisy support
values onto the cone of vectors realizable by an actual convex body: in
the plane that cone has an explicit description by local second-difference
inequalities, and the projection is computed exactly through its dual,
a nonnegative least-squares problem on the polar cone (Moreau's
decomposition turns the KKT system of the projection into the KKT system
of an NNLS).  In space no finite description is available, so an outer
cutting-plane loop accumulates sublinearity cuts until the fitted vector
is realizable.  The zonotope fit is a straight NNLS for generator
half-lengths over the node directions.

The NNLS solver is a deterministic Lawson-Hanson active-set iteration
(first-index tie-breaking, least squares on the passive set), so all
fits are reproducible bit-for-bit across runs.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .bodies import (
    Zonotope,
    _require_positive_hull,
    polytope_from_supports,
    support_values,
)
from .directions import as_direction_sequence, nodes
from .errors import (
    ConvergenceError,
    InvalidInputError,
    PositiveHullError,
    SpanError,
)
from .numeric import as_float_array, canonical_signs, dedupe_rows

KKT_TOL = 1e-9
CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class QPSolution:
    """Solution record for a cone projection, with its KKT certificate."""

    solution: np.ndarray
    objective: float
    kkt_residual: float
    active_set: tuple
    iterations: int

    def to_dict(self):
        return {
            "solution": [float(v) for v in self.solution],
            "objective": float(self.objective),
            "kkt_residual": float(self.kkt_residual),
            "active_set": [int(i) for i in self.active_set],
            "iterations": int(self.iterations),
        }


def _nnls_active_set(A, b, max_iter):
    k, m = A.shape
    x = np.zeros(m)
    passive = np.zeros(m, dtype=bool)
    # gradient tolerance scaled to the data; KKT is then satisfied to 1e-10
    # on unit-scale problems and proportionally otherwise
    scale = max(1.0, float(np.abs(A).max(initial=0.0)) * max(1.0, float(np.abs(b).max(initial=0.0))))
    tol = 1e-12 * scale
    iterations = 0
    for _ in range(max_iter):
        w = A.T @ (b - A @ x)
        w[passive] = -np.inf
        j = int(np.argmax(w))
        if w[j] <= tol:
            break
        passive[j] = True
        iterations += 1
        for _ in range(max_iter):
            cols = np.flatnonzero(passive)
            z, *_ = np.linalg.lstsq(A[:, cols], b, rcond=None)
            if np.all(z > 0.0):
                x[:] = 0.0
                x[cols] = z
                break
            iterations += 1
            xc = x[cols]
            mask = z <= 0.0
            alpha = np.min(xc[mask] / (xc[mask] - z[mask]))
            x[cols] = xc + alpha * (z - xc)
            drop = cols[x[cols] <= tol]
            x[drop] = 0.0
            passive[drop] = False
            if not np.any(passive):
                break
    return x, iterations


def nnls(A, b, max_iter=None):
    """Minimize ||A x - b|| over x >= 0 (deterministic active set)."""
    A = np.atleast_2d(as_float_array(A, "design matrix"))
    b = as_float_array(b, "target").reshape(-1)
    if A.shape[0] != len(b):
        raise InvalidInputError("design matrix rows must match target length")
    if A.shape[1] == 0:
        return np.zeros(0)
    x, _ = _nnls_active_set(A, b, max_iter or max(30, 3 * A.shape[1]))
    return x


def _project_onto_cone(G, y, max_iter=None):
    """Euclidean projection of y onto {h : G h >= 0} via the polar cone.

    Moreau: y splits as proj_cone(y) + proj_polar(y), and the polar part
    is -G^T mu with mu the NNLS solution of ||G^T mu + y||.
    """
    if len(G) == 0:
        return y.copy(), np.zeros(0), 0
    mu, iterations = _nnls_active_set(G.T, -y, max_iter or max(60, 6 * len(G)))
    return y + G.T @ mu, mu, iterations


def _certificate(h, y, G, mu, iterations):
    objective = float(np.sum((y - h) ** 2))
    if len(G):
        slack = G @ h
        feasibility = max(0.0, float(-slack.min()))
        complementarity = abs(float(mu @ slack))
        active = tuple(int(i) for i in np.flatnonzero(mu > 0.0))
    else:
        feasibility = 0.0
        complementarity = 0.0
        active = ()
    return QPSolution(
        solution=h,
        objective=objective,
        kkt_residual=max(feasibility, complementarity),
        active_set=active,
        iterations=iterations,
    )


def consistency_cone_2d(angles):
    """Constraint matrix G with G h >= 0 iff h is a consistent support vector.

    For sorted direction angles with all cyclic gaps below pi, consistency
    is equivalent to the local inequalities
    h_{i-1} sin(t_{i+1} - t_i) + h_{i+1} sin(t_i - t_{i-1})
    >= h_i sin(t_{i+1} - t_{i-1})  (indices cyclic).
    """
    t = as_float_array(angles, "angles").reshape(-1)
    k = len(t)
    if k < 3:
        raise InvalidInputError("need at least 3 directions")
    if np.any(np.diff(t) <= 0.0):
        raise InvalidInputError("angles must be strictly increasing")
    if t[-1] - t[0] >= 2.0 * np.pi:
        raise InvalidInputError("angles must span less than a full turn")
    prev_gap = np.diff(t, prepend=t[-1] - 2.0 * np.pi)
    next_gap = np.roll(prev_gap, -1)
    if np.any(prev_gap >= np.pi):
        raise PositiveHullError("an angular gap of pi or more leaves the cone unbounded")
    G = np.zeros((k, k))
    idx = np.arange(k)
    G[idx, (idx - 1) % k] = np.sin(next_gap)
    G[idx, (idx + 1) % k] = np.sin(prev_gap)
    G[idx, idx] = -np.sin(prev_gap + next_gap)
    return G


def consistency_constrained_lsq_2d(y, angles):
    """Least-squares consistent support vector at sorted planar angles.

    Projects y onto the polyhedral consistency cone; the result is the
    support vector of an actual convex set at every input angle.
    """
    y = as_float_array(y, "measurements").reshape(-1)
    G = consistency_cone_2d(angles)
    if len(y) != len(G):
        raise InvalidInputError("measurement count must match angle count")
    h, mu, iterations = _project_onto_cone(G, y)
    return _certificate(h, y, G, mu, iterations)


def _supporting_combination(U, h, vertex, i, k):
    """Cut coefficients from the facet certificate at a violated index.

    At the vertex attaining max x . u_i over P(h), the active constraint
    normals positively span u_i; sublinearity of support functions then
    gives sum lambda_j h_j >= h_i for every consistent h.
    """
    slack = h - U @ vertex
    for active_tol in (1e-7, 1e-5, 1e-3):
        J = np.flatnonzero(slack <= active_tol * max(1.0, float(np.abs(h).max())))
        if len(J) == 0:
            continue
        lam = nnls(U[J].T, U[i])
        if np.linalg.norm(U[J].T @ lam - U[i]) <= 1e-9:
            row = np.zeros(k)
            row[J] += lam
            row[i] -= 1.0
            return row
    return None


def _infeasibility_certificate(U, h):
    """Farkas row nu >= 0 with nu^T U = 0 and nu . h < 0 when P(h) is empty."""
    k = len(U)
    A_eq = np.vstack([U.T, h[None, :]])
    b_eq = np.concatenate([np.zeros(U.shape[1]), [-1.0]])
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0.0, None)] * k, method="highs")
    if res.status != 0:
        return None
    return res.x


def consistency_constrained_lsq_3d(y, dirs, max_rounds=1000):
    """Least-squares consistent support vector on the 2-sphere.

    No finite inequality description of the consistency cone exists here,
    so cuts are generated on demand: fit against the current cuts, build
    the polytope the fit describes, and wherever its support falls short
    of the fitted value, add the sublinearity cut extracted from the
    supporting vertex.  Terminates when the fit is realizable.
    """
    ds = as_direction_sequence(dirs)
    if ds.dims != 3:
        raise InvalidInputError("expected directions on the 2-sphere")
    y = as_float_array(y, "measurements").reshape(-1)
    k = len(ds)
    if len(y) != k:
        raise InvalidInputError("measurement count must match direction count")
    U = ds.vectors
    _require_positive_hull(U)
    G = np.zeros((0, k))
    mu = np.zeros(0)
    iterations = 0
    for _ in range(max_rounds):
        h, mu, its = _project_onto_cone(G, y)
        iterations += its
        poly = polytope_from_supports(U, h)
        if poly.is_empty:
            nu = _infeasibility_certificate(U, h)
            if nu is None:
                raise ConvergenceError("no infeasibility certificate for empty fit")
            G = np.vstack([G, nu[None, :]])
            continue
        supports = support_values(poly, U)
        violated = np.flatnonzero(supports < h - CONSISTENCY_TOL)
        if len(violated) == 0:
            return _certificate(h, y, G, mu, iterations)
        added = 0
        for i in violated:
            vertex = poly.vertices[int(np.argmax(poly.vertices @ U[i]))]
            row = _supporting_combination(U, h, vertex, int(i), k)
            if row is not None:
                G = np.vstack([G, row[None, :]])
                added += 1
        if added == 0:
            raise ConvergenceError("violated indices yielded no usable cuts")
    raise ConvergenceError(f"consistency not reached in {max_rounds} rounds")


def zonotope_lsq(y, dirs, node_dirs=None):
    """Best-fit zonotope with generators along node directions.

    Solves min ||A x - y|| over x >= 0 with A_{ij} = |u_i . v_j| on
    antipodal node representatives; x are the generator half-lengths.
    """
    ds = as_direction_sequence(dirs)
    y = as_float_array(y, "measurements").reshape(-1)
    if len(y) != len(ds):
        raise InvalidInputError("measurement count must match direction count")
    if np.linalg.matrix_rank(ds.vectors, tol=1e-10) < ds.dims:
        raise SpanError("directions do not span the ambient space")
    node_seq = nodes(ds) if node_dirs is None else as_direction_sequence(node_dirs)
    if node_seq.dims != ds.dims:
        raise InvalidInputError("node directions live in the wrong dimension")
    reps = dedupe_rows(canonical_signs(node_seq.vectors))
    A = np.abs(ds.vectors @ reps.T)
    keep = A.max(axis=0) >= 1e-12
    reps, A = reps[keep], A[:, keep]
    x = nnls(A, y)
    return Zonotope(reps, x)
