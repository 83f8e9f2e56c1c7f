"""Monte Carlo experiment runner and rate-exponent fitting.

An experiment sweeps one variable (measurement count k, body scale R, or
noise level sigma), reconstructs many independent noisy instances per grid
value, and records error metrics between the truth and each estimate.
Error-vs-variable tables are fitted with power laws ``a * x^b`` by least
squares in log-log coordinates, and emitted as CSV or standalone SVG
scatter plots.

Reproducibility contract: the seed of grid point g, iteration t is derived
deterministically from (base_seed, g, t), so iterations are independent,
rerunning a config reproduces every byte of output, and a failed iteration
cannot perturb any other iteration's draws.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .algorithms import (
    noisy_bright_lsq,
    noisy_rose_lsq,
    noisy_support_lsq,
    simulate_measurements,
)
from .bodies import AtomicMeasure, VPolytope, brightness_values, support_values
from .directions import equally_spaced_2d, stacked_net_sequence
from .errors import GeotomoError, InvalidInputError
from .metrics import dudley_distance, hausdorff_distance, l2_distance, pseudonorm
from .rng import derive_seed

PIPELINES = ("support", "brightness", "rose")
SWEEPS = ("k", "R", "sigma")
METRICS = ("pseudonorm", "l2", "hausdorff", "dudley")

_BODY_METRICS = ("l2", "hausdorff")


def _regular_gon(count, phase=0.0):
    a = 2.0 * np.pi * np.arange(count) / count + phase
    return np.column_stack([np.cos(a), np.sin(a)])


# Irregular convex 9-gon used alongside the regular bodies.  The vertex
# list is fixed here (angle in degrees, radius) and never compared against
# published error tables quantitatively.
_NINEGON_POLAR = (
    (0.0, 1.00),
    (40.0, 1.10),
    (75.0, 0.90),
    (120.0, 1.05),
    (155.0, 0.95),
    (195.0, 1.15),
    (235.0, 0.92),
    (275.0, 1.08),
    (320.0, 1.00),
)


def reference_bodies():
    """Named catalog of the fixed test bodies.

    * ``11gon``: regular 11-gon, circumradius 1, vertex at angle 0.
    * ``9gon``: irregular convex 9-gon (vertex list above).
    * ``12gon``: regular origin-symmetric 12-gon, circumradius 1.
    * ``octagon``: affinely regular origin-symmetric octagon (regular
      octagon sheared by [[1, 1/2], [0, 1]]).
    * ``square``: [-1, 1]^2.
    * ``cube``: [-1, 1]^3.
    """
    nine = np.array(
        [
            [r * math.cos(math.radians(a)), r * math.sin(math.radians(a))]
            for a, r in _NINEGON_POLAR
        ]
    )
    shear = np.array([[1.0, 0.5], [0.0, 1.0]])
    square = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
    cube = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], dtype=float)
    return {
        "11gon": VPolytope(_regular_gon(11)),
        "9gon": VPolytope(nine),
        "12gon": VPolytope(_regular_gon(12)),
        "octagon": VPolytope(_regular_gon(8) @ shear.T),
        "square": VPolytope(square),
        "cube": VPolytope(cube),
    }


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """One sweep: a truth, a pipeline, a grid, and what to record."""

    truth: object
    pipeline: str
    sweep: str
    sweep_values: tuple
    k: int = 35
    scale: float = 1.0
    sigma: float = 0.1
    iterations: int = 300
    base_seed: int = 0
    metrics: tuple = ("pseudonorm",)

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise InvalidInputError(f"pipeline must be one of {PIPELINES}")
        if self.sweep not in SWEEPS:
            raise InvalidInputError(f"sweep must be one of {SWEEPS}")
        values = tuple(float(v) for v in self.sweep_values)
        if len(values) == 0 or any(v <= 0 for v in values):
            raise InvalidInputError("sweep values must be nonempty and positive")
        if self.iterations < 1:
            raise InvalidInputError("iterations must be >= 1")
        if self.k < 1 or self.scale <= 0 or self.sigma < 0:
            raise InvalidInputError("fixed parameters out of range")
        metrics = tuple(self.metrics)
        for m in metrics:
            if m not in METRICS:
                raise InvalidInputError(f"unknown metric {m!r}")
        if self.pipeline == "rose":
            if not isinstance(self.truth, AtomicMeasure):
                raise InvalidInputError("rose experiments need an atomic measure truth")
            bad = [m for m in metrics if m in _BODY_METRICS]
            if bad:
                raise InvalidInputError(f"metrics {bad} undefined for measures")
        else:
            if not isinstance(self.truth, VPolytope):
                raise InvalidInputError("body experiments need a vertex polytope truth")
            if "dudley" in metrics:
                raise InvalidInputError("dudley metric applies to rose experiments")
        object.__setattr__(self, "sweep_values", values)
        object.__setattr__(self, "metrics", metrics)
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "sigma", float(self.sigma))


@dataclass(frozen=True, eq=False)
class ErrorTable:
    """Per-grid-point mean and max of each metric over the iterations."""

    sweep: str
    metrics: tuple
    xs: np.ndarray
    means: np.ndarray
    maxes: np.ndarray
    failures: np.ndarray
    iterations: int

    def __post_init__(self):
        object.__setattr__(self, "metrics", tuple(self.metrics))
        object.__setattr__(self, "xs", np.asarray(self.xs, dtype=float))
        object.__setattr__(self, "means", np.asarray(self.means, dtype=float))
        object.__setattr__(self, "maxes", np.asarray(self.maxes, dtype=float))
        object.__setattr__(self, "failures", np.asarray(self.failures, dtype=int))

    def column(self, metric, which="mean"):
        """The (xs, errors) series for one metric."""
        j = self.metrics.index(metric)
        if which == "mean":
            return self.xs, self.means[:, j]
        if which == "max":
            return self.xs, self.maxes[:, j]
        raise InvalidInputError("which must be 'mean' or 'max'")

    def equals(self, other):
        return (
            self.sweep == other.sweep
            and self.metrics == other.metrics
            and self.iterations == other.iterations
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.means, other.means, equal_nan=True)
            and np.array_equal(self.maxes, other.maxes, equal_nan=True)
            and np.array_equal(self.failures, other.failures)
        )


def _experiment_directions(dims, k):
    if dims == 2:
        return equally_spaced_2d(k)
    return stacked_net_sequence(dims, k)


def _centered(body):
    return body.translate(-body.centroid)


def _measure_errors(cfg, truth, dirs, report):
    out = report.output
    errors = {}
    if cfg.pipeline == "support":
        body = out
        fitted = support_values(body, dirs)
        exact = support_values(truth, dirs)
    elif cfg.pipeline == "brightness":
        body = out.polytope
        fitted = support_values(out.zonotope, dirs)
        exact = brightness_values(truth, dirs)
    else:
        body = None
        fitted = _rose_values(out, dirs)
        exact = _rose_values(truth, dirs)
    for metric in cfg.metrics:
        if metric == "pseudonorm":
            errors[metric] = pseudonorm(exact - fitted)
        elif metric == "dudley":
            errors[metric] = float(dudley_distance(truth, out))
        else:
            if body is None:
                raise InvalidInputError("body metric on a measure estimate")
            a, b = truth, body
            if cfg.pipeline == "brightness":
                # brightness data cannot see translations; compare centered
                a, b = _centered(a), _centered(b)
            if metric == "hausdorff":
                errors[metric] = float(hausdorff_distance(a, b))
            else:
                errors[metric] = float(l2_distance(a, b))
    return errors


def _rose_values(measure, dirs):
    if measure.atom_count == 0:
        return np.zeros(len(dirs))
    return np.abs(dirs.vectors @ measure.directions.T) @ measure.masses


_PIPELINE_FN = {
    "support": noisy_support_lsq,
    "brightness": noisy_bright_lsq,
    "rose": noisy_rose_lsq,
}


def _one_iteration(cfg, grid_index, iteration):
    value = cfg.sweep_values[grid_index]
    k = int(round(value)) if cfg.sweep == "k" else cfg.k
    scale = value if cfg.sweep == "R" else cfg.scale
    sigma = value if cfg.sweep == "sigma" else cfg.sigma
    truth = cfg.truth.scale(scale)
    dirs = _experiment_directions(cfg.truth.dims, k)
    seed = derive_seed(cfg.base_seed, grid_index, iteration)
    ms = simulate_measurements(truth, cfg.pipeline, dirs, sigma, seed)
    report = _PIPELINE_FN[cfg.pipeline](ms)
    if cfg.pipeline == "brightness" and report.output.polytope is None:
        if any(m in _BODY_METRICS for m in cfg.metrics):
            raise GeotomoError("degenerate zonotope: no body to compare")
    return _measure_errors(cfg, truth, dirs, report)


def run_experiment(cfg, threads=1):
    """Run the sweep and reduce to an :class:`ErrorTable`.

    Iterations may execute in parallel; results are reduced in
    (grid index, iteration) order, so the table is independent of the
    thread count.  A failed iteration is counted, not fatal.
    """
    grid = len(cfg.sweep_values)
    means = np.full((grid, len(cfg.metrics)), np.nan)
    maxes = np.full((grid, len(cfg.metrics)), np.nan)
    failures = np.zeros(grid, dtype=int)

    jobs = [(g, t) for g in range(grid) for t in range(cfg.iterations)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda gt: _guarded(cfg, *gt), jobs))
    else:
        outcomes = [_guarded(cfg, g, t) for g, t in jobs]

    for g in range(grid):
        rows = [outcomes[g * cfg.iterations + t] for t in range(cfg.iterations)]
        good = [r for r in rows if r is not None]
        failures[g] = cfg.iterations - len(good)
        if not good:
            continue
        stacked = np.array([[r[m] for m in cfg.metrics] for r in good])
        means[g] = stacked.mean(axis=0)
        maxes[g] = stacked.max(axis=0)
    return ErrorTable(
        sweep=cfg.sweep,
        metrics=cfg.metrics,
        xs=np.asarray(cfg.sweep_values),
        means=means,
        maxes=maxes,
        failures=failures,
        iterations=cfg.iterations,
    )


def _guarded(cfg, g, t):
    try:
        return _one_iteration(cfg, g, t)
    except GeotomoError:
        return None


@dataclass(frozen=True, eq=False)
class RateFit:
    """Power law error ~ amplitude * x^exponent fitted in log-log."""

    exponent: float
    amplitude: float
    r_squared: float
    points: np.ndarray  # rows (x, mean error, max error)
    which: str = "mean"
    metric: str = "pseudonorm"


def fit_rate(table, which="mean", metric=None):
    """Least-squares power-law fit of error against the sweep variable.

    ``table`` is an :class:`ErrorTable` (``metric`` picks the column,
    default the first) or an iterable of (x, error) pairs.  The fit is
    ordinary least squares of log(error) on log(x): the slope is the
    exponent, exp(intercept) the amplitude.
    """
    if which not in ("mean", "max"):
        raise InvalidInputError("which must be 'mean' or 'max'")
    if isinstance(table, ErrorTable):
        name = metric if metric is not None else table.metrics[0]
        xs, err = table.column(name, which)
        _, mean_err = table.column(name, "mean")
        _, max_err = table.column(name, "max")
        points = np.column_stack([xs, mean_err, max_err])
    else:
        pairs = np.asarray([[float(x), float(e)] for x, e in table], dtype=float).reshape(-1, 2)
        xs, err = pairs[:, 0], pairs[:, 1]
        points = np.column_stack([xs, err, err])
        name = metric if metric is not None else "error"
    if len(xs) < 3:
        raise InvalidInputError("rate fit needs at least 3 grid points")
    if np.any(~np.isfinite(err)) or np.any(err <= 0) or np.any(xs <= 0):
        raise InvalidInputError("rate fit needs positive finite errors and x")
    lx, le = np.log(xs), np.log(err)
    slope, intercept = np.polyfit(lx, le, 1)
    resid = le - (slope * lx + intercept)
    ss_res = float(resid @ resid)
    centered = le - le.mean()
    ss_tot = float(centered @ centered)
    if ss_tot <= 1e-300:
        r2 = 1.0 if ss_res <= 1e-12 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return RateFit(
        exponent=float(slope),
        amplitude=float(math.exp(intercept)),
        r_squared=float(r2),
        points=points,
        which=which,
        metric=name,
    )


# ---------------------------------------------------------------------------
# emission


def emit_csv(obj, path):
    """Write an ErrorTable or RateFit as CSV with a header row."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if isinstance(obj, ErrorTable):
                header = [obj.sweep]
                for m in obj.metrics:
                    header += [f"mean_{m}", f"max_{m}"]
                header += ["failures", "iterations"]
                writer.writerow(header)
                for g in range(len(obj.xs)):
                    row = [repr(float(obj.xs[g]))]
                    for j in range(len(obj.metrics)):
                        row += [repr(float(obj.means[g, j])), repr(float(obj.maxes[g, j]))]
                    row += [str(int(obj.failures[g])), str(int(obj.iterations))]
                    writer.writerow(row)
            elif isinstance(obj, RateFit):
                writer.writerow(["metric", "which", "exponent", "amplitude", "r_squared"])
                writer.writerow(
                    [obj.metric, obj.which, repr(obj.exponent), repr(obj.amplitude), repr(obj.r_squared)]
                )
            else:
                raise InvalidInputError("emit_csv expects an ErrorTable or RateFit")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def load_table(path):
    """Parse a CSV produced by :func:`emit_csv` back into an ErrorTable."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InvalidInputError(f"{path}: empty table file")
    header = rows[0]
    if len(header) < 4 or header[-2:] != ["failures", "iterations"]:
        raise InvalidInputError(f"{path}: not an error-table CSV")
    sweep = header[0]
    metric_cols = header[1:-2]
    if len(metric_cols) % 2 != 0:
        raise InvalidInputError(f"{path}: malformed metric columns")
    metrics = []
    for i in range(0, len(metric_cols), 2):
        mc, xc = metric_cols[i], metric_cols[i + 1]
        if not (mc.startswith("mean_") and xc == "max_" + mc[5:]):
            raise InvalidInputError(f"{path}: malformed metric columns")
        metrics.append(mc[5:])
    body = rows[1:]
    if body:
        try:
            data = np.asarray([[float(c) for c in row[:-1]] for row in body])
            iters = {int(row[-1]) for row in body}
        except ValueError as exc:
            raise InvalidInputError(f"{path}: non-numeric entry") from exc
        if len(iters) != 1:
            raise InvalidInputError(f"{path}: inconsistent iteration counts")
        iterations = iters.pop()
        xs = data[:, 0]
        means = data[:, 1:-1:2]
        maxes = data[:, 2:-1:2]
        failures = data[:, -1].astype(int)
    else:
        xs = np.zeros(0)
        means = np.zeros((0, len(metrics)))
        maxes = np.zeros((0, len(metrics)))
        failures = np.zeros(0, dtype=int)
        iterations = 1
    return ErrorTable(
        sweep=sweep,
        metrics=tuple(metrics),
        xs=xs,
        means=means,
        maxes=maxes,
        failures=failures,
        iterations=iterations,
    )


_SVG_W, _SVG_H = 640, 440
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 20, 50


def _log_ticks(lo, hi):
    # decade ticks, padded with 2x and 5x when the span is short
    first, last = math.floor(lo), math.ceil(hi)
    ticks = []
    for d in range(first, last + 1):
        for mult in (1.0, 2.0, 5.0):
            t = math.log10(mult) + d
            if lo - 1e-9 <= t <= hi + 1e-9:
                ticks.append(t)
    if len(ticks) > 8:
        ticks = [t for t in ticks if abs(t - round(t)) < 1e-9]
    return ticks or [lo, hi]


def _fmt(v):
    return f"{v:.6g}"


def _svg_document(parts):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">\n'
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>\n'
        + "\n".join(parts)
        + "\n</svg>\n"
    )


def _scatter_svg(xs, mean_err, max_err, fit, xlabel, ylabel):
    finite = [v for v in np.concatenate([mean_err, max_err]) if np.isfinite(v) and v > 0]
    if len(finite) == 0 or len(xs) == 0:
        return _svg_document(["<!-- empty table -->"])
    lx = np.log10(xs)
    ly_all = np.log10(finite)
    x_lo, x_hi = float(lx.min()), float(lx.max())
    y_lo, y_hi = float(ly_all.min()), float(ly_all.max())
    if x_hi - x_lo < 1e-9:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi - y_lo < 1e-9:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad_x = 0.04 * (x_hi - x_lo)
    pad_y = 0.08 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B

    def px(logx):
        return _MARGIN_L + (logx - x_lo) / (x_hi - x_lo) * plot_w

    def py(logy):
        return _MARGIN_T + (y_hi - logy) / (y_hi - y_lo) * plot_h

    parts = [
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>'
    ]
    for t in _log_ticks(x_lo, x_hi):
        x = px(t)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_MARGIN_T + plot_h}" x2="{x:.2f}" '
            f'y2="{_MARGIN_T + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_MARGIN_T + plot_h + 18}" font-size="11" '
            f'text-anchor="middle">{_fmt(10.0 ** t)}</text>'
        )
    for t in _log_ticks(y_lo, y_hi):
        y = py(t)
        parts.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{y:.2f}" x2="{_MARGIN_L}" y2="{y:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.2f}" font-size="11" '
            f'text-anchor="end">{_fmt(10.0 ** t)}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_SVG_H - 12}" font-size="13" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.2f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.2f})">{ylabel}</text>'
    )
    if fit is not None:
        y0 = math.log10(fit.amplitude) + fit.exponent * (x_lo + pad_x)
        y1 = math.log10(fit.amplitude) + fit.exponent * (x_hi - pad_x)
        parts.append(
            f'<line x1="{px(x_lo + pad_x):.2f}" y1="{py(y0):.2f}" x2="{px(x_hi - pad_x):.2f}" '
            f'y2="{py(y1):.2f}" stroke="#555555" stroke-dasharray="6 3" class="fit-line"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L + plot_w - 6}" y="{_MARGIN_T + 16}" font-size="12" '
            f'text-anchor="end">slope {fit.exponent:.4f}</text>'
        )
    for xv, ev in zip(lx, mean_err):
        if np.isfinite(ev) and ev > 0:
            parts.append(
                f'<circle cx="{px(xv):.2f}" cy="{py(math.log10(ev)):.2f}" r="3.5" '
                'fill="#1f6fb4" class="mean-marker"/>'
            )
    for xv, ev in zip(lx, max_err):
        if np.isfinite(ev) and ev > 0:
            x, y = px(xv), py(math.log10(ev))
            parts.append(
                f'<rect x="{x - 3:.2f}" y="{y - 3:.2f}" width="6" height="6" '
                'fill="#c23b22" class="max-marker"/>'
            )
    return _svg_document(parts)


def emit_svg(obj, path, metric=None, which="mean"):
    """Write a log-log scatter (mean and max markers, fitted line) as SVG."""
    if isinstance(obj, ErrorTable):
        name = metric if metric is not None else obj.metrics[0]
        xs, mean_err = obj.column(name, "mean")
        _, max_err = obj.column(name, "max")
        fit = None
        try:
            fit = fit_rate(obj, which=which, metric=name)
        except InvalidInputError:
            pass
        svg = _scatter_svg(xs, mean_err, max_err, fit, obj.sweep, f"{name} error")
    elif isinstance(obj, RateFit):
        xs = obj.points[:, 0]
        svg = _scatter_svg(
            xs, obj.points[:, 1], obj.points[:, 2], obj, "x", f"{obj.metric} error"
        )
    else:
        raise InvalidInputError("emit_svg expects an ErrorTable or RateFit")
    try:
        with open(path, "w") as fh:
            fh.write(svg)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
