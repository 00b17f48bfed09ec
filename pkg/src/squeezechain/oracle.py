"""Brute-force Fock-space reference for small chains (N <= 10).

Everything here is computed from dense 2^N x 2^N matrices: the quadratic
fermion Hamiltonian on a ring, its exact eigendecomposition, and direct
matrix elements of fermion bilinears and Pauli products. It shares no code
with the momentum-space route and exists to check it.

Basis: site state |up> = occupied, so S^z = c^+ c - 1/2, and
c_j = prod_{l<j} (-sigma^z_l) sigma^-_j.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .errors import InvalidParameters, SizeTooLarge
from .model import ModelParams

MAX_SITES = 10
DEGENERACY_TOL = 1e-9

_I2 = np.eye(2)
_SZ = np.diag([1.0, -1.0])
_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SY = np.array([[0.0, -1j], [1j, 0.0]])
_LOWER = np.array([[0.0, 0.0], [1.0, 0.0]])
PAULI = {"x": _SX, "y": _SY, "z": _SZ}


def _check_size(n):
    if n > MAX_SITES:
        raise SizeTooLarge(f"oracle limited to N <= {MAX_SITES}, got {n}")


def _site_op(n_sites, site, local, left=_I2):
    return reduce(np.kron, [left] * site + [local] + [_I2] * (n_sites - site - 1))


@lru_cache(maxsize=8)
def annihilators(n_sites: int):
    """Jordan-Wigner annihilation operators c_1..c_N as dense real matrices."""
    _check_size(n_sites)
    return tuple(_site_op(n_sites, j, _LOWER, left=-_SZ) for j in range(n_sites))


def spin_op(n_sites: int, site: int, axis: str) -> np.ndarray:
    """S^axis on one site."""
    return _site_op(n_sites, site, PAULI[axis] / 2.0)


@lru_cache(maxsize=8)
def fermion_parity_op(n_sites: int) -> np.ndarray:
    """(-1)^(fermion number), diagonal in the occupation basis."""
    return reduce(np.kron, [-_SZ] * n_sites)


def fermion_hamiltonian(params: ModelParams, h: float, boundary_sign: int = 1) -> np.ndarray:
    """-1/2 sum_n (c_n^+ c_{n+1} + delta c_n^+ c_{n+1}^+ + h.c.) - h sum_n (c_n^+ c_n - 1/2)

    on a ring with c_{N+1} = boundary_sign * c_1.
    """
    n = params.n_sites
    c = annihilators(n)
    dim = 2 ** n
    ham = np.zeros((dim, dim))
    for j in range(n):
        nxt = c[(j + 1) % n] * (boundary_sign if j == n - 1 else 1)
        hop = c[j].T @ nxt + params.delta * c[j].T @ nxt.T
        ham -= 0.5 * (hop + hop.T)
        ham -= h * (c[j].T @ c[j] - 0.5 * np.eye(dim))
    return ham


def spin_hamiltonian(params: ModelParams, h: float) -> np.ndarray:
    """The XY chain with periodic spin boundary conditions, built from Pauli products."""
    n = params.n_sites
    _check_size(n)
    sx = [spin_op(n, j, "x") for j in range(n)]
    sy = [spin_op(n, j, "y") for j in range(n)]
    sz = [spin_op(n, j, "z") for j in range(n)]
    ham = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for j in range(n):
        m = (j + 1) % n
        ham -= (1 + params.delta) * sx[j] @ sx[m] + (1 - params.delta) * sy[j] @ sy[m]
        ham -= h * sz[j]
    return ham.real


@dataclass(frozen=True)
class FockState:
    amplitudes: np.ndarray
    params: ModelParams
    h: float
    boundary_sign: int

    def expect(self, op) -> complex:
        v = self.amplitudes
        return complex(np.vdot(v, op @ v))


def _k_pi_occupation(n_sites: int) -> np.ndarray:
    c = annihilators(n_sites)
    ck = sum(((-1) ** j) * c[j] for j in range(n_sites)) / np.sqrt(n_sites)
    return ck.T @ ck


def _lowest(ham, n_sites):
    w, v = np.linalg.eigh(ham)
    ground = np.abs(w - w[0]) < DEGENERACY_TOL * max(1.0, abs(w[0]))
    space = v[:, ground]
    if space.shape[1] == 1:
        return space[:, 0]
    # degenerate ground space: take the state with the k = pi mode filled
    occ = space.T @ _k_pi_occupation(n_sites) @ space
    ow, ov = np.linalg.eigh(occ)
    return space @ ov[:, -1]


def fock_ground_state(params: ModelParams, h: float, fermions: str = "auto") -> FockState:
    """Lowest eigenvector of the fermion ring Hamiltonian.

    "periodic" and "antiperiodic" fix the ring boundary. "auto" keeps the
    periodic ring when its ground state has odd fermion number and otherwise
    switches to the antiperiodic ring. A degenerate ground space (the zero
    mode at h = 1) is resolved by filling the k = pi mode.
    """
    n = params.n_sites
    _check_size(n)
    if fermions not in ("auto", "periodic", "antiperiodic"):
        raise InvalidParameters(f"unknown fermion boundary {fermions!r}")
    sign = -1 if fermions == "antiperiodic" else 1
    psi = _lowest(fermion_hamiltonian(params, h, sign), n)
    if fermions == "auto":
        parity = float(np.real(np.vdot(psi, fermion_parity_op(n) @ psi)))
        if parity > 0:
            sign = -1
            psi = _lowest(fermion_hamiltonian(params, h, sign), n)
    return FockState(amplitudes=psi.astype(complex), params=params, h=float(h), boundary_sign=sign)


def fock_evolve(state: FockState, h2: float, t: float) -> FockState:
    """exp(-i H(h2) t) applied by exact eigendecomposition on the state's ring."""
    ham = fermion_hamiltonian(state.params, h2, state.boundary_sign)
    w, v = np.linalg.eigh(ham)
    amp = v @ (np.exp(-1j * w * t) * (v.T @ state.amplitudes))
    return FockState(amplitudes=amp, params=state.params, h=float(h2),
                     boundary_sign=state.boundary_sign)


def majoranas(n_sites: int):
    c = annihilators(n_sites)
    a = [x.T + x for x in c]
    b = [x.T - x for x in c]
    return a, b


def fock_measure(state: FockState, observable) -> complex:
    """Exact expectation value of a named observable.

    ``observable`` is a tuple:
      ("AA" | "AB" | "BA", l, m)  fermion bilinear <X_l Y_m>
      ("density", l, m)           <c_l^+ c_m>
      ("S", a, l, b, m)           <S^a_l S^b_m>
      ("J", a, b)                 <J_a J_b> with J_a = sum_l S^a_l
      ("Jz",)                     <J_z>
      ("energy", h)               <H(h)> on the state's ring
    """
    n = state.params.n_sites
    kind = observable[0]
    if kind in ("AA", "AB", "BA"):
        a, b = majoranas(n)
        left = a if kind[0] == "A" else b
        right = a if kind[1] == "A" else b
        return state.expect(left[observable[1]] @ right[observable[2]])
    if kind == "density":
        c = annihilators(n)
        return state.expect(c[observable[1]].T @ c[observable[2]])
    if kind == "S":
        _, ax, l, bx, m = observable
        return state.expect(spin_op(n, l, ax) @ spin_op(n, m, bx))
    if kind == "J":
        ja = sum(spin_op(n, j, observable[1]) for j in range(n))
        jb = sum(spin_op(n, j, observable[2]) for j in range(n))
        return state.expect(ja @ jb)
    if kind == "Jz":
        return state.expect(sum(spin_op(n, j, "z") for j in range(n)))
    if kind == "energy":
        return state.expect(fermion_hamiltonian(state.params, observable[1], state.boundary_sign))
    raise InvalidParameters(f"unknown observable {observable!r}")


def reference_values(params: ModelParams, h1: float, h2: float, t: float,
                     fermions: str = "auto") -> dict:
    """Every quantity the momentum-space pipeline produces, measured directly.

    ``xi2`` uses the collective moments <J_a J_b> of the state itself;
    ``xi2_site`` uses N/4 + N sum_n <S^a_1 S^b_{1+n}>, which is what the
    pipeline computes and differs from ``xi2`` only when the state is not
    translation invariant as a spin state.
    """
    n = params.n_sites
    state = fock_evolve(fock_ground_state(params, h1, fermions), h2, t)
    m = lambda *obs: fock_measure(state, obs)
    aa = [0j] + [m("AA", 0, r) for r in range(1, n)]
    ab = [m("AB", 0, r).real for r in range(n)]
    ba = [m("BA", 0, r).real for r in range(n)]
    density = [m("density", 0, r).real for r in range(n)]
    g = {ab2: [m("S", ab2[0], 0, ab2[1], r).real for r in range(1, n)]
         for ab2 in ("xx", "yy", "xy", "yx", "zz")}
    mz = m("Jz").real / n
    jj = {p: m("J", p[0], p[1]).real for p in ("xx", "yy", "xy", "yx", "zz")}
    xi2 = _xi2_from_moments(n, jj["xx"], jj["yy"], jj["xy"] + jj["yx"])
    site = {p: n / 4 + n * sum(g[p]) for p in ("xx", "yy")}
    cross = n * (sum(g["xy"]) + sum(g["yx"]))
    return {
        "n_sites": n, "delta": params.delta, "h1": h1, "h2": h2, "t": t,
        "boundary_sign": state.boundary_sign,
        "aa_imag": [x.imag for x in aa], "ab": ab, "ba": ba, "density": density,
        "gxx": g["xx"], "gyy": g["yy"], "gxy": g["xy"], "gyx": g["yx"], "gzz": g["zz"],
        "mz": mz, "var_jz": jj["zz"] - (n * mz) ** 2,
        "xi2": xi2, "xi2_site": _xi2_from_moments(n, site["xx"], site["yy"], cross),
    }


def _xi2_from_moments(n, jxx, jyy, jxy_sym):
    return 2.0 / n * (jxx + jyy - np.sqrt((jxx - jyy) ** 2 + jxy_sym ** 2))


def write_fixture(path, cases) -> None:
    """Write reference values for (params, h1, h2, t[, fermions]) cases as JSON."""
    rows = []
    for case in cases:
        params, h1, h2, t = case[:4]
        fermions = case[4] if len(case) > 4 else "auto"
        row = reference_values(params, h1, h2, t, fermions)
        row["fermions"] = fermions
        rows.append(row)
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1)
        fh.write("\n")
