"""End-to-end reconstruction pipelines.

Three estimators share one shape: sample a geometric functional at finitely
many directions, perturb with Gaussian noise, and fit a body or measure by
constrained least squares.

* noisy_support_lsq: support-function data -> consistency-constrained fit
  -> polytope.
* noisy_bright_lsq: brightness-function data -> nonnegative zonotope fit on
  node directions (the fitted zonotope is the projection body of the
  estimate) -> Minkowski reconstruction of the body itself.
* noisy_rose_lsq: rose-of-intersections data -> the same zonotope fit; the
  directional measure estimate is half the zonotope's surface measure, so
  no second phase is needed.

Noise is drawn from the counter-based generator in :mod:`geotomo.rng`, one
substream word pair per measurement index, so extending a direction
sequence preserves earlier draws and every pipeline is a pure function of
(input, seed).
"""

import csv
import json
import time
from dataclasses import dataclass

import numpy as np

from .bodies import (
    AtomicMeasure,
    VPolytope,
    Zonotope,
    brightness_values,
    measure_from_zonotope,
    minkowski_reconstruct,
    polytope_from_supports,
    support_values,
)
from .directions import DirectionSequence, as_direction_sequence
from .errors import InvalidInputError
from .metrics import pseudonorm
from .rng import gaussian
from .solvers import (
    consistency_constrained_lsq_2d,
    consistency_constrained_lsq_3d,
    zonotope_lsq,
)

MEASUREMENT_KINDS = ("support", "brightness", "rose")


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Directions, noisy values, and the noise metadata that produced them."""

    dirs: DirectionSequence
    values: np.ndarray
    noise_sigma: float = 0.0
    seed: int = 0
    kind: str = "support"

    def __post_init__(self):
        ds = as_direction_sequence(self.dirs)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if len(values) != len(ds):
            raise InvalidInputError("value count must match direction count")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("values must be finite")
        if self.noise_sigma < 0:
            raise InvalidInputError("noise sigma must be nonnegative")
        if self.kind not in MEASUREMENT_KINDS:
            raise InvalidInputError(f"kind must be one of {MEASUREMENT_KINDS}")
        values.setflags(write=False)
        object.__setattr__(self, "dirs", ds)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "noise_sigma", float(self.noise_sigma))
        object.__setattr__(self, "seed", int(self.seed))

    def __len__(self):
        return len(self.values)

    @property
    def dims(self):
        return self.dirs.dims


@dataclass(frozen=True, eq=False)
class BrightnessFit:
    """Phase I and (when the zonotope is full-dimensional) Phase II output."""

    zonotope: Zonotope
    surface_measure: AtomicMeasure
    polytope: VPolytope | None


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """A pipeline's output with its fit residual and solver diagnostics."""

    output: object
    residual: float
    diagnostics: object = None
    wall_time: float = 0.0
    flags: tuple = ()

    def __post_init__(self):
        if self.residual < 0:
            raise InvalidInputError("residual must be nonnegative")


def _exact_values(source, kind, ds):
    if kind == "rose":
        if not isinstance(source, AtomicMeasure):
            raise InvalidInputError("rose measurements need an atomic measure")
        if source.dims != ds.dims:
            raise InvalidInputError("measure and directions disagree on dimension")
        if source.atom_count == 0:
            return np.zeros(len(ds))
        return np.abs(ds.vectors @ source.directions.T) @ source.masses
    if not isinstance(source, VPolytope):
        raise InvalidInputError(f"{kind} measurements need a vertex polytope")
    if source.dims != ds.dims:
        raise InvalidInputError("body and directions disagree on dimension")
    if kind == "support":
        return support_values(source, ds)
    if kind == "brightness":
        return brightness_values(source, ds)
    raise InvalidInputError(f"kind must be one of {MEASUREMENT_KINDS}")


def simulate_measurements(source, kind, dirs, sigma=0.0, seed=0):
    """Exact functional values plus independent N(0, sigma^2) noise.

    The draw for measurement index i depends only on (seed, i), so the
    same (source, dirs, sigma, seed) always reproduces the same values and
    a longer direction sequence extends rather than reshuffles them.
    """
    ds = as_direction_sequence(dirs)
    if sigma < 0:
        raise InvalidInputError("sigma must be nonnegative")
    values = _exact_values(source, kind, ds)
    if sigma > 0:
        values = values + sigma * gaussian(seed, len(ds))
    return MeasurementSet(ds, values, noise_sigma=sigma, seed=seed, kind=kind)


def _support_h_2d(y, ds):
    angles = ds.angles
    order = np.argsort(angles, kind="stable")
    sol = consistency_constrained_lsq_2d(y[order], angles[order])
    h = np.empty_like(sol.solution)
    h[order] = sol.solution
    active = tuple(int(order[i]) for i in sol.active_set)
    return h, sol, active


def noisy_support_lsq(measurements):
    """Fit a polytope to noisy support-function values.

    The support vector is projected onto the consistency cone (exactly in
    the plane, by cutting planes on the sphere) and the polytope it
    determines is returned; its support values at the measured directions
    reproduce the fit.
    """
    m = measurements
    ds = m.dirs
    if ds.dims not in (2, 3):
        raise InvalidInputError("support reconstruction expects n in {2, 3}")
    if len(m) < ds.dims + 1:
        raise InvalidInputError("need at least n + 1 measurements")
    start = time.perf_counter()
    if ds.dims == 2:
        h, sol, active = _support_h_2d(m.values, ds)
        diagnostics = type(sol)(
            solution=h,
            objective=sol.objective,
            kkt_residual=sol.kkt_residual,
            active_set=active,
            iterations=sol.iterations,
        )
    else:
        diagnostics = consistency_constrained_lsq_3d(m.values, ds)
        h = diagnostics.solution
    body = polytope_from_supports(ds, h)
    elapsed = time.perf_counter() - start
    return ReconstructionReport(
        output=body,
        residual=pseudonorm(m.values - h),
        diagnostics=diagnostics,
        wall_time=elapsed,
    )


def _zonotope_phase(m):
    fit = zonotope_lsq(m.values, m.dirs)
    residual = pseudonorm(m.values - support_values(fit, m.dirs))
    return fit, residual


def noisy_bright_lsq(measurements):
    """Fit an origin-symmetric body to noisy brightness-function values.

    Phase I fits a zonotope on node directions; it is the projection body
    of the estimate, and its surface measure (mass x_j at both +-v_j) is
    the estimate's surface area measure.  Phase II solves the Minkowski
    problem for that measure.  A zonotope whose generators do not span the
    space admits no body; the report then carries the Phase I results with
    a ``degenerate-zonotope`` flag and no polytope.

    Brightness determines a body only up to translation, and only
    origin-symmetric bodies are determined at all; the reconstruction
    targets the origin-symmetric representative with centroid at the
    origin.
    """
    m = measurements
    if m.dims not in (2, 3):
        raise InvalidInputError("brightness reconstruction expects n in {2, 3}")
    start = time.perf_counter()
    fit, residual = _zonotope_phase(m)
    surface = measure_from_zonotope(fit)
    flags = ()
    body = None
    if fit.is_full_dimensional:
        body = minkowski_reconstruct(surface)
    else:
        flags = ("degenerate-zonotope",)
    elapsed = time.perf_counter() - start
    return ReconstructionReport(
        output=BrightnessFit(zonotope=fit, surface_measure=surface, polytope=body),
        residual=residual,
        wall_time=elapsed,
        flags=flags,
    )


def noisy_rose_lsq(measurements):
    """Estimate a directional measure from noisy rose-of-intersections data.

    The rose of a measure mu is gamma(u) = integral of |u.v| d mu(v), the
    support function of a zonotope whose surface measure is 2 mu.  Fitting
    that zonotope and halving its surface measure estimates mu directly;
    zero data yields the zero measure.
    """
    m = measurements
    start = time.perf_counter()
    fit, residual = _zonotope_phase(m)
    estimate = measure_from_zonotope(fit).scale(0.5)
    elapsed = time.perf_counter() - start
    return ReconstructionReport(
        output=estimate,
        residual=residual,
        wall_time=elapsed,
    )


# ---------------------------------------------------------------------------
# measurement file I/O


def save_measurements(csv_path, measurements, meta_path=None):
    """Write values as CSV (header u_1,..,u_n,value) plus a JSON sidecar.

    The sidecar {sigma, seed, kind} defaults to ``<csv_path>.meta.json``.
    """
    m = measurements
    n = m.dims
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"u_{i + 1}" for i in range(n)] + ["value"])
        for row, value in zip(m.dirs.vectors, m.values):
            writer.writerow([repr(float(c)) for c in row] + [repr(float(value))])
    meta = meta_path if meta_path is not None else f"{csv_path}.meta.json"
    with open(meta, "w") as fh:
        json.dump(
            {"sigma": m.noise_sigma, "seed": m.seed, "kind": m.kind},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")


def load_measurements(csv_path, meta_path=None, default_kind="support"):
    """Read a measurement CSV and its metadata sidecar if present."""
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidInputError(f"{csv_path}: empty measurement file")
    header = rows[0]
    if len(header) < 3 or header[-1] != "value":
        raise InvalidInputError(f"{csv_path}: expected header u_1,..,u_n,value")
    try:
        data = np.asarray([[float(c) for c in row] for row in rows[1:]], dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"{csv_path}: non-numeric entry") from exc
    if data.ndim != 2 or data.shape[1] != len(header):
        raise InvalidInputError(f"{csv_path}: ragged rows")
    sigma, seed, kind = 0.0, 0, default_kind
    meta = meta_path if meta_path is not None else f"{csv_path}.meta.json"
    try:
        with open(meta) as fh:
            loaded = json.load(fh)
    except FileNotFoundError:
        if meta_path is not None:
            raise
    else:
        if not isinstance(loaded, dict):
            raise InvalidInputError(f"{meta}: expected a JSON object")
        sigma = float(loaded.get("sigma", sigma))
        seed = int(loaded.get("seed", seed))
        kind = str(loaded.get("kind", kind))
    return MeasurementSet(
        DirectionSequence(data[:, :-1]),
        data[:, -1],
        noise_sigma=sigma,
        seed=seed,
        kind=kind,
    )
