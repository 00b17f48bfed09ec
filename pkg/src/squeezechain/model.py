"""XY chain parameters, momentum grid, dispersion and Bogoliubov angles.

The chain is

    H = -sum_n [(1 + delta) S^x_n S^x_{n+1} + (1 - delta) S^y_n S^y_{n+1}] - h sum_n S^z_n

with unit exchange coupling and periodic boundaries, solved as the
fermionic c-cycle problem (periodic Jordan-Wigner fermions).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMode, InvalidParameters

# below this the quasiparticle energy is treated as an exact zero
ZERO_ENERGY_TOL = 1e-14


@dataclass(frozen=True)
class ModelParams:
    n_sites: int
    delta: float
    coupling: float = 1.0

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise InvalidParameters(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        if not (0.0 < self.delta <= 1.0):
            raise InvalidParameters(f"delta must lie in (0, 1], got {self.delta!r}")
        if self.coupling != 1.0:
            raise InvalidParameters("coupling is fixed to 1")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "delta", float(self.delta))


@dataclass(frozen=True)
class MomentumGrid:
    """Allowed momenta k = 2*pi*m/N ordered by |m|, positive first.

    Periodic fermions use integer m; antiperiodic fermions use half-integer
    m. ``sin`` and ``cos`` are exact at k = 0 and k = pi, so the zero mode at
    h = 1 comes out with A = B = 0 exactly.
    """

    m: np.ndarray
    modes: np.ndarray
    sin: np.ndarray
    cos: np.ndarray
    antiperiodic: bool = False

    def __len__(self):
        return len(self.modes)

    @property
    def unpaired(self) -> np.ndarray:
        """Mask of the self-conjugate modes k = 0 and k = pi."""
        return self.sin == 0.0


def momentum_grid(params: ModelParams, antiperiodic: bool = False) -> MomentumGrid:
    """Momentum grid of the fermion ring.

    Periodic fermions (the c-cycle): m = 0, +-1, ..., +-(N/2 - 1), N/2 for
    even N and m = 0, +-1, ..., +-(N-1)/2 for odd N. Antiperiodic fermions
    shift every m by one half, keeping k inside (-pi, pi].
    """
    n = params.n_sites
    # work with 2m so both grids are integer
    if antiperiodic:
        cands = range(1, n + 1, 2)
    else:
        cands = range(0, n + 1, 2)
    two_m = []
    for j in cands:
        two_m.append(j)
        if j != 0 and j != n:
            two_m.append(-j)
    two_m = np.array(two_m, dtype=int)
    k = np.pi * two_m / n
    s = np.sin(k)
    c = np.cos(k)
    s[two_m == 0] = 0.0
    c[two_m == 0] = 1.0
    s[two_m == n] = 0.0
    c[two_m == n] = -1.0
    return MomentumGrid(m=two_m / 2.0, modes=k, sin=s, cos=c, antiperiodic=antiperiodic)


def dispersion(params: ModelParams, h, k):
    """Quasiparticle energy sqrt((cos k + h)^2 + (delta sin k)^2)."""
    k = np.asarray(k, dtype=float)
    e = np.hypot(np.cos(k) + h, params.delta * np.sin(k))
    return float(e) if e.ndim == 0 else e


def bogoliubov_angle(params: ModelParams, h: float, k: float) -> float:
    """Half the two-argument arctangent of (delta sin k, cos k + h).

    Raises DegenerateMode at a zero-energy mode, where the angle is
    undefined; mode-resolved code uses theta = 0 there instead.
    """
    a = np.cos(k) + h
    b = params.delta * np.sin(k)
    if np.hypot(a, b) < ZERO_ENERGY_TOL:
        raise DegenerateMode(f"zero-energy mode at h={h}, k={k}")
    return 0.5 * float(np.arctan2(b, a))


@dataclass(frozen=True)
class BogoliubovFrame:
    h: float
    a_coeff: np.ndarray
    b_coeff: np.ndarray
    theta: np.ndarray
    energy: np.ndarray


def bogoliubov_frame(params: ModelParams, h: float, grid: MomentumGrid | None = None) -> BogoliubovFrame:
    if grid is None:
        grid = momentum_grid(params)
    a = grid.cos + h
    b = params.delta * grid.sin
    energy = np.hypot(a, b)
    theta = 0.5 * np.arctan2(b, a)
    theta[energy < ZERO_ENERGY_TOL] = 0.0
    return BogoliubovFrame(h=float(h), a_coeff=a, b_coeff=b, theta=theta, energy=energy)


def _abs_slope(params: ModelParams, h: float, k: np.ndarray, dk: float) -> np.ndarray:
    return np.abs(dispersion(params, h, k + dk) - dispersion(params, h, k - dk)) / (2 * dk)


def max_group_velocity(params: ModelParams, h: float, samples: int = 20001) -> float:
    """Largest |d eps/dk| of the post-quench band.

    At h = 1 this returns delta, the velocity that sets the revival period
    when quenching onto the critical point.
    """
    if h == 1.0:
        return params.delta
    k = np.linspace(-np.pi, np.pi, samples)
    dk = 1e-6
    slope = _abs_slope(params, h, k, dk)
    i = int(np.argmax(slope))
    # golden-section refinement inside the bracketing cells
    lo, hi = k[max(i - 1, 0)], k[min(i + 1, samples - 1)]
    g = (np.sqrt(5.0) - 1.0) / 2.0
    f = lambda x: float(_abs_slope(params, h, np.array([x]), dk)[0])
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(60):
        if f1 > f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
    return max(f1, f2, float(slope[i]))
