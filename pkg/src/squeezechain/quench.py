"""Sudden field quench h1 -> h2 and the time-dependent fermion contractions.

With Phi_k = theta2_k - theta1_k and w_k = 2 eps2_k t, the contractions
on the periodic chain are, for separation r,

    <A_l A_{l+r}> = (i/N) sum_k sin(kr) sin 2Phi sin w
    <A_l B_{l+r}> = -(1/N) sum_k [cos(2theta2 + kr) cos 2Phi + sin 2Phi sin(2theta2 + kr) cos w]
    <B_l A_{l+r}> = +(1/N) sum_k [cos(2theta2 - kr) cos 2Phi + sin 2Phi sin(2theta2 - kr) cos w]
    <c_l^+ c_{l+r}> = delta_{r0}/2 + (1/2N) sum_k cos(kr) [cos 2Phi cos 2theta2 + sin 2Phi sin 2theta2 cos w]

with A = c^+ + c and B = c^+ - c. The signs are the ones for which the
ground state magnetization goes to +1/2 at large field; they are checked
against exact diagonalization in ``oracle``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidParameters
from .model import BogoliubovFrame, ModelParams, MomentumGrid, bogoliubov_frame, momentum_grid


@dataclass(frozen=True)
class ContractionKernel:
    """Two-point functions at one time, indexed by separation r = 0..N-1."""

    time: float
    aa: np.ndarray
    ab: np.ndarray
    ba: np.ndarray
    density: np.ndarray
    # Pfaffian of the full 2N x 2N contraction matrix; +-1 for these pure states
    parity: float | None = None

    @property
    def n_sites(self) -> int:
        return len(self.aa)


@dataclass(frozen=True)
class QuenchSpec:
    params: ModelParams
    h1: float
    h2: float
    grid: MomentumGrid
    frame1: BogoliubovFrame
    frame2: BogoliubovFrame
    phi: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_sites(self) -> int:
        return self.params.n_sites

    @cached_property
    def _phase_tables(self):
        # cos(kr), sin(kr) with rows r and columns k; kr = pi * idx / N exactly
        n = self.n_sites
        two_m = np.rint(2.0 * self.grid.m).astype(int)
        idx = np.outer(np.arange(n), two_m) % (2 * n)
        ang = np.pi * idx / n
        c = np.cos(ang)
        s = np.sin(ang)
        # exact values at multiples of pi/2
        for q, (cv, sv) in enumerate(((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))):
            if (q * n) % 2 == 0:
                hit = idx == q * n // 2
                c[hit] = cv
                s[hit] = sv
        return c, s

    @cached_property
    def _mode_factors(self):
        two_phi = 2.0 * self.phi
        two_th = 2.0 * self.frame2.theta
        return (np.cos(two_phi), np.sin(two_phi), np.cos(two_th), np.sin(two_th))

    @property
    def parity(self) -> float:
        """Pfaffian of the full contraction matrix, fixed by the initial state."""
        if "parity" not in self._cache:
            from .correlators import full_contraction_matrix
            from .pfaffian import pfaffian

            pf = pfaffian(full_contraction_matrix(kernel_at(self, 0.0, with_parity=False)))
            self._cache["parity"] = 1.0 if pf.real >= 0 else -1.0
        return self._cache["parity"]


FERMION_BOUNDARIES = ("auto", "periodic", "antiperiodic")


def vacuum_fermion_parity(frame: BogoliubovFrame, grid: MomentumGrid) -> int:
    """(-1)^(fermion number) of the Bogoliubov vacuum.

    Paired modes (k, -k) always hold an even number of fermions; an unpaired
    mode at k = 0 or pi is filled when cos 2theta > 0.
    """
    filled = np.count_nonzero(np.cos(2.0 * frame.theta[grid.unpaired]) > 0)
    return -1 if filled % 2 else 1


def make_quench(params: ModelParams, h1: float, h2: float, fermions: str = "auto") -> QuenchSpec:
    """Pre/post-quench Bogoliubov frames on a shared momentum grid.

    ``fermions`` picks the Jordan-Wigner fermion boundary condition.
    "periodic" is the c-cycle ring. With "auto", the periodic ring is kept when
    its ground state has odd fermion number, which makes it an exact state of
    the periodic spin chain; otherwise (even N, h1 >= 1) the antiperiodic ring
    is used, whose even-number ground state is the spin chain's. Fermion
    number parity is conserved by the evolution, so the choice holds for all t.
    """
    if not (h1 >= 0 and h2 >= 0) or not (np.isfinite(h1) and np.isfinite(h2)):
        raise InvalidParameters(f"fields must be finite and >= 0, got h1={h1!r}, h2={h2!r}")
    if fermions not in FERMION_BOUNDARIES:
        raise InvalidParameters(f"fermions must be one of {FERMION_BOUNDARIES}, got {fermions!r}")
    grid = momentum_grid(params, antiperiodic=(fermions == "antiperiodic"))
    f1 = bogoliubov_frame(params, h1, grid)
    if fermions == "auto" and vacuum_fermion_parity(f1, grid) == 1:
        grid = momentum_grid(params, antiperiodic=True)
        f1 = bogoliubov_frame(params, h1, grid)
    f2 = bogoliubov_frame(params, h2, grid)
    return QuenchSpec(params=params, h1=float(h1), h2=float(h2), grid=grid,
                      frame1=f1, frame2=f2, phi=f2.theta - f1.theta)


def kernel_at(spec: QuenchSpec, t: float, with_parity: bool = True) -> ContractionKernel:
    """Direct O(N^2) summation of the contractions at time t."""
    if not (t >= 0) or not np.isfinite(t):
        raise InvalidParameters(f"time must be finite and >= 0, got {t!r}")
    n = spec.n_sites
    cos_kr, sin_kr = spec._phase_tables
    c2p, s2p, c2t, s2t = spec._mode_factors
    w = 2.0 * spec.frame2.energy * t
    cw = np.cos(w)
    sw = np.sin(w)
    p = c2t * c2p + s2p * s2t * cw
    q = s2t * c2p - s2p * c2t * cw
    cp = cos_kr @ p
    sq = sin_kr @ q
    aa = 1j * (sin_kr @ (s2p * sw)) / n
    ab = -(cp - sq) / n
    ba = (cp + sq) / n
    density = cp / (2.0 * n)
    density[0] += 0.5
    return ContractionKernel(time=float(t), aa=aa, ab=ab, ba=ba, density=density,
                             parity=spec.parity if with_parity else None)


def diagonal_kernel(spec: QuenchSpec) -> ContractionKernel:
    """Kernel with every cos(2 eps t), sin(2 eps t) averaged to zero."""
    n = spec.n_sites
    cos_kr, sin_kr = spec._phase_tables
    c2p, s2p, c2t, s2t = spec._mode_factors
    p = c2t * c2p
    q = s2t * c2p
    cp = cos_kr @ p
    sq = sin_kr @ q
    density = cp / (2.0 * n)
    density[0] += 0.5
    return ContractionKernel(time=float("inf"), aa=np.zeros(n, dtype=complex),
                             ab=-(cp - sq) / n, ba=(cp + sq) / n, density=density)
