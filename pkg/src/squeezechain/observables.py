"""Squeezing parameter, J_z variance and magnetization along quench trajectories."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .correlators import CorrelatorSet, correlators_at
from .errors import (EvolutionError, InvalidParameters, NegativeDiscriminant,
                     NegativeVariance, NoRevivalFound, SqueezeChainError, WindowTooLong)
from .model import ModelParams, max_group_velocity
from .quench import ContractionKernel, QuenchSpec, kernel_at, make_quench

DISCRIMINANT_FLOOR = -1e-12
VARIANCE_FLOOR = -1e-9
TRANSIENT = 5.0
# averaging windows must end before this fraction of the first revival
REVIVAL_GUARD = 0.9
# smallest chain for which the plateau is long enough to calibrate against
MIN_REVIVAL_SIZE = 80


def xi_squared(corrs: CorrelatorSet, n_sites: int) -> float:
    """Squeezing parameter with the mean spin along z.

    1 + 2 S(xx + yy) - 2 sqrt(S(xx - yy)^2 + S(xy + yx)^2), S summing n = 1..N-1.
    """
    if len(corrs.gxx) != n_sites - 1:
        raise InvalidParameters(f"need {n_sites - 1} separations, got {len(corrs.gxx)}")
    s_plus = np.sum(corrs.gxx + corrs.gyy)
    s_minus = np.sum(corrs.gxx - corrs.gyy)
    s_cross = np.sum(corrs.gxy + corrs.gyx)
    disc = s_minus * s_minus + s_cross * s_cross
    if disc < DISCRIMINANT_FLOOR:
        raise NegativeDiscriminant(f"discriminant {disc:.3g}")
    return float(1.0 + 2.0 * s_plus - 2.0 * np.sqrt(max(disc, 0.0)))


def magnetization(kernel: ContractionKernel) -> float:
    """M_z = <J_z>/N = <c^+ c> - 1/2."""
    return float(kernel.density[0] - 0.5)


def variance_jz(kernel: ContractionKernel, corrs: CorrelatorSet, n_sites: int) -> float:
    """<J_z^2> - <J_z>^2 from translation invariance."""
    mz = magnetization(kernel)
    var = n_sites * (0.25 + np.sum(corrs.gzz)) - (n_sites * mz) ** 2
    if var < VARIANCE_FLOOR:
        raise NegativeVariance(f"variance {var:.3g}")
    return float(max(var, 0.0))


def observables_at(spec: QuenchSpec, t: float, method: str = "auto"):
    """(xi2, var_jz, mz) at one time."""
    kernel = kernel_at(spec, t)
    corrs = correlators_at(kernel, method=method)
    n = spec.n_sites
    return xi_squared(corrs, n), variance_jz(kernel, corrs, n), magnetization(kernel)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    xi2: np.ndarray
    var_jz: np.ndarray
    mz: np.ndarray
    params: ModelParams | None = None
    h1: float | None = None
    h2: float | None = None


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("SQUEEZECHAIN_WORKERS")
        workers = int(env) if env else 1
    if workers < 1:
        raise InvalidParameters(f"workers must be >= 1, got {workers}")
    return workers


_WORKER_SPEC = None


def _init_worker(spec):
    global _WORKER_SPEC
    _WORKER_SPEC = spec


def _point(t):
    try:
        return observables_at(_WORKER_SPEC, t)
    except SqueezeChainError as exc:
        raise EvolutionError(t, exc) from exc


def _run_points(spec: QuenchSpec, times, workers: int):
    if workers == 1 or len(times) < 2:
        _init_worker(spec)
        return [_point(t) for t in times]
    # warm the parity cache once so workers do not recompute it
    spec.parity
    chunk = max(1, len(times) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(spec,)) as pool:
        return list(pool.map(_point, times, chunksize=chunk))


def evolve(params: ModelParams, quench: QuenchSpec, t_grid, workers: int | None = None) -> Trajectory:
    """Observables on a time grid. Points are independent and merged in grid order."""
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise InvalidParameters("t_grid must be a nonempty 1-d array")
    if np.any(times < 0) or np.any(np.diff(times) < 0) or not np.all(np.isfinite(times)):
        raise InvalidParameters("t_grid must be finite, >= 0 and nondecreasing")
    if quench.params != params:
        raise InvalidParameters("quench was built for different model parameters")
    rows = np.array(_run_points(quench, times, resolve_workers(workers)), dtype=float)
    return Trajectory(times=times, xi2=rows[:, 0], var_jz=rows[:, 1], mz=rows[:, 2],
                      params=params, h1=quench.h1, h2=quench.h2)


def predicted_revival(params: ModelParams, h2: float) -> float:
    """N / (2 v_max) for the post-quench band."""
    return params.n_sites / (2.0 * max_group_velocity(params, h2))


def uniform_grid(t_min: float, t_max: float, step: float) -> np.ndarray:
    if not (step > 0) or not (t_max >= t_min):
        raise InvalidParameters(f"bad grid [{t_min}, {t_max}] step {step}")
    count = int(np.floor((t_max - t_min) / step + 1e-9))
    grid = t_min + step * np.arange(count + 1)
    if t_max - grid[-1] > 1e-9 * max(1.0, abs(t_max)):
        grid = np.append(grid, t_max)
    return grid


def _trapezoid_mean(t, y):
    if len(t) == 1:
        return float(y[0])
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)) / (t[-1] - t[0]))


def default_window(params: ModelParams, h2: float):
    return (TRANSIENT, 0.8 * predicted_revival(params, h2))


def long_time_average(params: ModelParams, quench: QuenchSpec, window=None, step: float = 0.1,
                      workers: int | None = None):
    """Trapezoidal time averages of xi2 and var_jz over ``window``."""
    if window is None:
        window = default_window(params, quench.h2)
    t_min, t_max = map(float, window)
    if not (0 <= t_min < t_max):
        raise InvalidParameters(f"window must satisfy 0 <= t_min < t_max, got {window}")
    limit = REVIVAL_GUARD * predicted_revival(params, quench.h2)
    if t_max >= limit:
        raise WindowTooLong(f"t_max={t_max} reaches the revival guard {limit:.4g}")
    traj = evolve(params, quench, uniform_grid(t_min, t_max, step), workers=workers)
    return _trapezoid_mean(traj.times, traj.xi2), _trapezoid_mean(traj.times, traj.var_jz)


@dataclass(frozen=True)
class AverageCurve:
    h2_values: np.ndarray
    xi2_avg: np.ndarray
    var_avg: np.ndarray
    window: tuple = ()
    step: float = 0.1


def average_sweep(params: ModelParams, h1: float, h2_list, window=None, step: float = 0.1,
                  workers: int | None = None) -> AverageCurve:
    """Long-time averages for each post-quench field.

    Without an explicit window all points share [5, 0.8 min T_rev(h2)], so
    the curve is not distorted by a field-dependent window.
    """
    h2_values = np.asarray(h2_list, dtype=float)
    if h2_values.ndim != 1 or h2_values.size == 0:
        raise InvalidParameters("h2_list must be a nonempty 1-d array")
    d = np.diff(h2_values)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise InvalidParameters("h2_list must be strictly monotone")
    if window is None:
        window = min((default_window(params, h2) for h2 in h2_values), key=lambda w: w[1])
    window = tuple(map(float, window))
    xi, var = [], []
    for h2 in h2_values:
        a, b = long_time_average(params, make_quench(params, h1, h2), window, step, workers)
        xi.append(a)
        var.append(b)
    return AverageCurve(h2_values=h2_values, xi2_avg=np.array(xi), var_avg=np.array(var),
                        window=window, step=step)


def _ground_xi2(args):
    params, h = args
    kernel = kernel_at(make_quench(params, h, h), 0.0)
    return xi_squared(correlators_at(kernel), params.n_sites)


def ground_state_sweep(params: ModelParams, h_list, workers: int | None = None):
    """Ground-state xi2 for each field. Returns an (len(h_list), 2) array of (h, xi2)."""
    h = np.asarray(h_list, dtype=float)
    if h.ndim != 1 or h.size == 0:
        raise InvalidParameters("h_list must be a nonempty 1-d array")
    jobs = [(params, float(x)) for x in h]
    workers = resolve_workers(workers)
    if workers == 1:
        xi = [_ground_xi2(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            xi = list(pool.map(_ground_xi2, jobs))
    return np.column_stack((h, xi))


def detect_revival(traj: Trajectory, baseline_window, threshold_sigmas: float = 6.0) -> float:
    """First large excursion of xi2 from its plateau after the baseline window.

    The plateau mean and standard deviation come from samples inside
    ``baseline_window``. The excursion is the contiguous run of samples
    beyond the band that starts at the first one after the window; the
    returned time is where the deviation peaks within that run, which keeps
    small ripples on the rising edge from being taken for the revival.
    """
    if threshold_sigmas <= 0:
        raise InvalidParameters("threshold_sigmas must be positive")
    t_a, t_b = map(float, baseline_window)
    t = traj.times
    base = (t >= t_a) & (t <= t_b)
    if base.sum() < 3:
        raise InvalidParameters("baseline window holds fewer than 3 samples")
    mean = float(np.mean(traj.xi2[base]))
    sigma = float(np.std(traj.xi2[base]))
    dev = np.abs(traj.xi2 - mean)
    outside = (dev > threshold_sigmas * sigma) & (dev > 0)
    after = np.nonzero((t > t_b) & outside)[0]
    if after.size == 0:
        raise NoRevivalFound(f"no excursion beyond {threshold_sigmas} sigma after t={t_b}")
    start = end = int(after[0])
    while end + 1 < len(t) and outside[end + 1]:
        end += 1
    return float(t[start + int(np.argmax(dev[start:end + 1]))])


@dataclass(frozen=True)
class RevivalFit:
    sizes: np.ndarray
    revival_times: np.ndarray
    slope: float
    slope_err: float
    residuals: np.ndarray


def fit_through_origin(sizes, times) -> RevivalFit:
    n = np.asarray(sizes, dtype=float)
    tr = np.asarray(times, dtype=float)
    if n.size < 2:
        raise InvalidParameters("a fit needs at least two sizes")
    slope = float(n @ tr / (n @ n))
    resid = tr - slope * n
    dof = n.size - 1
    err = float(np.sqrt(resid @ resid / dof / (n @ n)))
    return RevivalFit(sizes=np.asarray(sizes, dtype=int), revival_times=tr, slope=slope,
                      slope_err=err, residuals=resid)


def revival_time(delta: float, h1: float, h2: float, n_sites: int, dt: float = 0.1,
                 horizon: float = 1.25, baseline=(0.3, 0.75), threshold_sigmas: float = 6.0,
                 workers: int | None = None) -> float:
    """Detected first revival for one size.

    Times are in units of the predicted revival T = N/(2 v_max): the
    trajectory covers [baseline[0], horizon] T and the plateau statistics
    come from [baseline[0], baseline[1]] T.
    """
    params = ModelParams(n_sites, delta)
    t_pred = predicted_revival(params, h2)
    t_a, t_b = baseline[0] * t_pred, baseline[1] * t_pred
    traj = evolve(params, make_quench(params, h1, h2),
                  uniform_grid(t_a, horizon * t_pred, dt), workers=workers)
    return detect_revival(traj, (t_a, t_b), threshold_sigmas)


def revival_scan(delta: float, h1: float, h2: float, sizes, **kwargs) -> RevivalFit:
    """Revival time for each size and the fit T_rev = k N."""
    sizes = [int(s) for s in sizes]
    if min(sizes) < MIN_REVIVAL_SIZE:
        raise InvalidParameters(f"revival scans need N >= {MIN_REVIVAL_SIZE}")
    times = [revival_time(delta, h1, h2, n, **kwargs) for n in sizes]
    return fit_through_origin(sizes, times)
