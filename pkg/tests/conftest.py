"""Shared generators for the test suite.

Random geometric objects are built from seeded numpy Generators so every
test run sees the same instances.
"""

import numpy as np

from geotomo import AtomicMeasure, VPolytope, equally_spaced_2d, support_values

# one line per acceptance criterion, repeated after the run by the hook below
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def rng(seed):
    return np.random.default_rng(seed)


def random_polygon(seed, vertex_count=8, radius=1.0):
    """Convex polygon with vertices on a noisy circle, centered roughly at 0."""
    g = rng(seed)
    angles = np.sort(g.uniform(0.0, 2.0 * np.pi, vertex_count))
    radii = radius * g.uniform(0.5, 1.0, vertex_count)
    pts = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    return VPolytope(pts)


def random_polytope_3d(seed, point_count=12, radius=1.0):
    """Convex hull of random points in a ball; full dimensional w.h.p."""
    g = rng(seed)
    pts = g.normal(size=(point_count, 3))
    pts *= radius * g.uniform(0.4, 1.0, point_count)[:, None] / np.linalg.norm(
        pts, axis=1
    )[:, None]
    return VPolytope(pts)


def random_directions(seed, count, dims):
    g = rng(seed)
    vecs = g.normal(size=(count, dims))
    return vecs / np.linalg.norm(vecs, axis=1)[:, None]


def random_measure(seed, atom_count=6, dims=2, even=False, total=None):
    """Atomic measure with random unit directions and positive masses."""
    g = rng(seed)
    vecs = random_directions(seed + 1, atom_count, dims)
    masses = g.uniform(0.2, 1.5, atom_count)
    mu = AtomicMeasure(vecs, masses)
    if even:
        mu = AtomicMeasure(
            np.vstack([vecs, -vecs]), np.concatenate([masses, masses]) / 2.0
        ).merged()
    if total is not None:
        mu = mu.scale(total / mu.total_mass)
    return mu


def support_gap(body_a, body_b, probe_count=4096):
    """Max support-function gap over a dense direction probe; lower bounds
    the Hausdorff distance and equals it in the limit."""
    dims = body_a.dims
    if dims == 2:
        probes = equally_spaced_2d(probe_count)
        ha = support_values(body_a, probes)
        hb = support_values(body_b, probes)
    else:
        vecs = random_directions(0, probe_count, dims)
        ha = support_values(body_a, vecs)
        hb = support_values(body_b, vecs)
    return float(np.max(np.abs(ha - hb)))


def fibonacci_sphere(count):
    """Quasi-uniform unit vectors on the 2-sphere; grid for spread oracles."""
    idx = np.arange(count, dtype=float) + 0.5
    z = 1.0 - 2.0 * idx / count
    theta = np.pi * (1.0 + np.sqrt(5.0)) * idx
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def sampled_feasible_integral(pts, coeffs, seed, tries=1000):
    """Best integral of randomly drawn feasible bounded-Lipschitz functions.

    Feasible means sup|f| <= s, Lip(f) <= L on the atom set, s + L <= 1;
    random profiles are rescaled into the constraint set.
    """
    g = np.random.default_rng(seed)
    m = len(pts)
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    np.fill_diagonal(d, 1.0)
    d = np.maximum(d, 1e-12)  # coincident atoms force f to agree there
    best = 0.0
    for _ in range(tries):
        raw = g.uniform(-1.0, 1.0, m)
        sup = np.abs(raw).max()
        gaps = np.abs(raw[:, None] - raw[None, :]) / d
        np.fill_diagonal(gaps, 0.0)
        lip = gaps.max()
        t = g.uniform(0.0, 1.0) / max(sup + lip, 1e-30)
        best = max(best, float(t * raw @ coeffs))
    return best
