"""Cone projections: NNLS, planar consistency cone, spherical cuts, zonotope fit."""

import json
import math

import numpy as np
import pytest
import scipy.optimize
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import random_directions, random_polygon, random_polytope_3d
from geotomo import (
    InvalidInputError,
    PositiveHullError,
    SpanError,
    Zonotope,
    consistency_cone_2d,
    consistency_constrained_lsq_2d,
    consistency_constrained_lsq_3d,
    equally_spaced_2d,
    nnls,
    node_representatives,
    polytope_from_supports,
    stacked_net_sequence,
    support_values,
    zonotope_lsq,
)
from geotomo.rng import gaussian

KKT_TOL = 1e-9


# ---------------------------------------------------------------------------
# oracles


def exhaustive_cone_projection(G, y):
    """Projection onto {h : G h >= 0} by enumerating active sets.

    For every subset of constraints pinned to equality, the candidate is
    the orthogonal projection of y onto the corresponding nullspace; the
    optimum is the feasible candidate closest to y.  Exponential, for
    cross-checking small instances only.
    """
    k = len(G)
    best = None
    for mask in range(2**k):
        rows = [i for i in range(k) if mask >> i & 1]
        if rows:
            Gs = G[rows]
            lam = np.linalg.pinv(Gs @ Gs.T) @ (Gs @ y)
            h = y - Gs.T @ lam
        else:
            h = y.copy()
        if (G @ h).min() >= -1e-9:
            obj = float(np.sum((y - h) ** 2))
            if best is None or obj < best[0]:
                best = (obj, h)
    return best


def nnls_kkt_violation(A, b, x):
    """Max violation of the stationarity/complementarity conditions."""
    g = A.T @ (A @ x - b)
    scale = max(1.0, float(np.abs(A).max()) * max(1.0, float(np.abs(b).max())))
    neg = float(np.minimum(x, 0.0).min())
    grad = float(np.minimum(g, 0.0).min())
    comp = float(np.abs(x * g).max(initial=0.0))
    return max(-neg, -grad, comp) / scale


# ---------------------------------------------------------------------------
# NNLS


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**31),
    k=st.integers(3, 30),
    m=st.integers(1, 12),
)
def test_nnls_satisfies_kkt(seed, k, m):
    g = np.random.default_rng(seed)
    A = g.normal(size=(k, m))
    b = g.normal(size=k)
    x = nnls(A, b)
    assert np.all(x >= 0.0)
    assert nnls_kkt_violation(A, b, x) < 1e-8


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(8, 40), m=st.integers(1, 6))
def test_nnls_matches_scipy_when_overdetermined(seed, k, m):
    # unique optimum for full-column-rank tall systems, so the two
    # implementations must agree; wide systems have optimum faces where
    # they may legitimately differ
    g = np.random.default_rng(seed)
    A = g.normal(size=(k, m))
    b = g.normal(size=k)
    x = nnls(A, b)
    ref, _ = scipy.optimize.nnls(A, b)
    assert_allclose(x, ref, atol=1e-8)


def test_nnls_exact_on_nonnegative_systems():
    g = np.random.default_rng(5)
    A = np.abs(g.normal(size=(20, 6)))
    truth = g.uniform(0.5, 2.0, 6)
    x = nnls(A, A @ truth)
    assert_allclose(x, truth, atol=1e-10)


def test_nnls_input_validation():
    with pytest.raises(InvalidInputError):
        nnls(np.eye(3), np.ones(2))
    assert nnls(np.zeros((3, 0)), np.ones(3)).shape == (0,)


# ---------------------------------------------------------------------------
# 2D consistency cone


def test_cone_2d_quarter_turns():
    G = consistency_cone_2d(equally_spaced_2d(4).angles)
    # quarter-turn gaps: the constraint at i reads h_{i-1} + h_{i+1} >= 0
    h = np.array([1.0, 1.0, 1.0, -5.0])
    assert_allclose(G @ h, [-4.0, 2.0, -4.0, 2.0], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(3, 50))
def test_cone_2d_accepts_real_support_vectors(seed, k):
    body = random_polygon(seed)
    angles = np.sort(np.mod(0.01 * (seed % 100) + 2 * np.pi * np.arange(k) / k, 2 * np.pi))
    vectors = np.column_stack([np.cos(angles), np.sin(angles)])
    G = consistency_cone_2d(angles)
    h = support_values(body, vectors)
    assert float((G @ h).min()) >= -1e-9 * max(1.0, np.abs(h).max())


def test_cone_2d_input_validation():
    with pytest.raises(InvalidInputError):
        consistency_cone_2d([0.0, 1.0])
    with pytest.raises(InvalidInputError):
        consistency_cone_2d([0.0, 2.0, 1.0])
    with pytest.raises(InvalidInputError):
        consistency_cone_2d([0.0, 3.0, 2.0 * np.pi])
    with pytest.raises(PositiveHullError):
        consistency_cone_2d([0.0, 0.5, 1.0])  # leaves a gap over pi


def test_projection_2d_golden_quartet():
    # projecting (1, 1, 1, -5): the pair sums must become nonnegative, and
    # the cheapest repair moves h_1 and h_3 by 2 each
    sol = consistency_constrained_lsq_2d(
        np.array([1.0, 1.0, 1.0, -5.0]), equally_spaced_2d(4).angles
    )
    assert_allclose(sol.solution, [1.0, 3.0, 1.0, -3.0], atol=1e-10)
    assert sol.objective == pytest.approx(8.0, abs=1e-10)
    assert sol.kkt_residual < KKT_TOL


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(3, 7))
def test_projection_2d_matches_exhaustive_oracle(seed, k):
    g = np.random.default_rng(seed)
    angles = equally_spaced_2d(k, offset=g.uniform(0, 0.3)).angles
    y = g.normal(size=k) * 2.0
    sol = consistency_constrained_lsq_2d(y, angles)
    obj, h = exhaustive_cone_projection(consistency_cone_2d(angles), y)
    assert sol.objective == pytest.approx(obj, abs=1e-8)
    assert_allclose(sol.solution, h, atol=1e-6)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(5, 60))
def test_projection_2d_consistent_data_is_fixed(seed, k):
    body = random_polygon(seed)
    ds = equally_spaced_2d(k)
    y = support_values(body, ds.vectors)
    sol = consistency_constrained_lsq_2d(y, ds.angles)
    assert sol.objective == pytest.approx(0.0, abs=1e-18)
    assert_allclose(sol.solution, y, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(5, 40))
def test_projection_2d_never_beats_truth(seed, k):
    # the true support vector is feasible, so the optimum cannot exceed
    # the noise energy
    body = random_polygon(seed)
    ds = equally_spaced_2d(k)
    noise = 0.2 * gaussian(seed, k)
    y = support_values(body, ds.vectors) + noise
    sol = consistency_constrained_lsq_2d(y, ds.angles)
    assert sol.objective <= float(noise @ noise) + 1e-10
    assert sol.kkt_residual < KKT_TOL
    # the fit is realizable: some convex set attains it
    p = polytope_from_supports(ds, sol.solution)
    assert_allclose(support_values(p, ds.vectors), sol.solution, atol=1e-8)


def test_projection_2d_shape_mismatch():
    with pytest.raises(InvalidInputError):
        consistency_constrained_lsq_2d(np.ones(3), equally_spaced_2d(4).angles)


# ---------------------------------------------------------------------------
# 3D consistency via cutting planes


def test_projection_3d_consistent_data_is_fixed():
    body = random_polytope_3d(1)
    ds = stacked_net_sequence(3, 40)
    y = support_values(body, ds.vectors)
    sol = consistency_constrained_lsq_3d(y, ds)
    assert sol.objective == pytest.approx(0.0, abs=1e-16)
    assert_allclose(sol.solution, y, atol=1e-10)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_projection_3d_noisy_fit_is_realizable(seed):
    body = random_polytope_3d(seed)
    ds = stacked_net_sequence(3, 35)
    noise = 0.1 * gaussian(seed, 35)
    y = support_values(body, ds.vectors) + noise
    sol = consistency_constrained_lsq_3d(y, ds)
    assert sol.objective <= float(noise @ noise) + 1e-10
    assert sol.kkt_residual < KKT_TOL
    p = polytope_from_supports(ds, sol.solution)
    assert not p.is_empty
    assert_allclose(support_values(p, ds.vectors), sol.solution, atol=1e-7)


def test_projection_3d_requires_positive_span():
    g = np.random.default_rng(2)
    v = g.normal(size=(20, 3))
    v[:, 2] = np.abs(v[:, 2]) + 0.1  # all in the upper half-space
    v /= np.linalg.norm(v, axis=1)[:, None]
    with pytest.raises(PositiveHullError):
        consistency_constrained_lsq_3d(np.ones(20), v)


# ---------------------------------------------------------------------------
# zonotope fitting


def test_zonotope_lsq_recovers_node_aligned_generators_2d():
    ds = equally_spaced_2d(12)
    reps = node_representatives(ds)
    g = np.random.default_rng(3)
    truth = g.uniform(0.3, 1.5, len(reps.vectors))
    z_true = Zonotope(reps.vectors, truth)
    y = support_values(z_true, ds.vectors)
    fit = zonotope_lsq(y, ds)
    got = {tuple(np.round(d, 9)): x for d, x in zip(fit.directions, fit.half_lengths)}
    for d, x in zip(z_true.directions, truth):
        key = tuple(np.round(d, 9))
        alt = tuple(np.round(-d, 9))
        assert got.get(key, got.get(alt, 0.0)) == pytest.approx(x, abs=1e-8)
    resid = support_values(fit, ds.vectors) - y
    assert float(np.abs(resid).max()) < 1e-10


def test_zonotope_lsq_explicit_nodes_3d():
    gens = random_directions(11, 5, 3)
    truth = np.random.default_rng(12).uniform(0.4, 1.2, 5)
    ds = stacked_net_sequence(3, 40)
    y = support_values(Zonotope(gens, truth), ds.vectors)
    fit = zonotope_lsq(y, ds, node_dirs=gens)
    order = np.abs(fit.directions @ gens.T).argmax(axis=1)
    assert_allclose(fit.half_lengths, truth[order], atol=1e-9)


def test_zonotope_lsq_noisy_is_stationary():
    ds = equally_spaced_2d(18)
    z = Zonotope(random_directions(4, 4, 2), np.full(4, 0.8))
    y = support_values(z, ds.vectors) + 0.05 * gaussian(9, 18)
    fit = zonotope_lsq(y, ds)
    reps = fit.directions
    A = np.abs(ds.vectors @ reps.T)
    assert nnls_kkt_violation(A, y, fit.half_lengths) < 1e-8


def test_zonotope_lsq_requires_spanning_directions():
    with pytest.raises(SpanError):
        zonotope_lsq(np.ones(2), np.array([[1.0, 0.0], [-1.0, 0.0]]))


def test_solution_record_is_json_ready():
    sol = consistency_constrained_lsq_2d(
        np.array([1.0, 1.0, 1.0, -5.0]), equally_spaced_2d(4).angles
    )
    blob = json.loads(json.dumps(sol.to_dict()))
    assert blob["objective"] == pytest.approx(8.0)
    assert isinstance(blob["active_set"], list)
    assert blob["iterations"] >= 1
