"""Spin-spin correlators G_n^{ab} = <S^a_1 S^b_{1+n}> as Pfaffians of contractions.

After Jordan-Wigner, each transverse correlator is a string of A/B operators:

    xx: B1 A2 B2 ... An Bn A(n+1)        prefactor 1/4
    yy: A1 B2 A2 ... Bn An B(n+1)        prefactor (-1)^n / 4
    xy: B1 A2 B2 ... An Bn B(n+1)        prefactor -i/4
    yx: A1 B2 A2 ... Bn An A(n+1)        prefactor i (-1)^n / 4

and Wick's theorem turns the string expectation into a Pfaffian.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ImaginaryResidue, SeparationOutOfRange
from .pfaffian import nested_pfaffians, pfaffian
from .quench import ContractionKernel

KINDS = ("xx", "yy", "xy", "yx")
RESIDUE_TOL = 1e-9
# the two ends of the nested evaluation must agree this well (relative,
# with an absolute floor far below anything visible in the correlators)
OVERLAP_RTOL = 1e-8
OVERLAP_ATOL = 1e-14
# below this size the per-separation pivoted route is cheap enough
DIRECT_MAX_SITES = 8


@dataclass(frozen=True)
class CorrelatorSet:
    """Correlators for separations n = 1..N-1 (index 0 holds n = 1)."""

    gxx: np.ndarray
    gyy: np.ndarray
    gxy: np.ndarray
    gyx: np.ndarray
    gzz: np.ndarray

    @property
    def separations(self) -> np.ndarray:
        return np.arange(1, len(self.gxx) + 1)


def _lookup(kernel: ContractionKernel, typ_i, site_i, typ_j, site_j):
    """<phi_i phi_j> for operator types (0 = A, 1 = B) and sites.

    Valid for site_i <= site_j; reversed pairs are handled by the caller
    through antisymmetry.
    """
    r = site_j - site_i
    aa = kernel.aa[r]
    return np.where(typ_i == typ_j, aa,
                    np.where(typ_i == 0, kernel.ab[r], kernel.ba[r]))


def _skew_from_ops(kernel: ContractionKernel, types, sites) -> np.ndarray:
    types = np.asarray(types)
    sites = np.asarray(sites)
    ti, tj = types[:, None], types[None, :]
    si, sj = sites[:, None], sites[None, :]
    forward = sj >= si
    lo_t = np.where(forward, ti, tj)
    hi_t = np.where(forward, tj, ti)
    lo_s = np.where(forward, si, sj)
    hi_s = np.where(forward, sj, si)
    val = _lookup(kernel, lo_t, lo_s, hi_t, hi_s).astype(complex)
    # <phi_j phi_i> = -<phi_i phi_j> for distinct operators
    m = np.triu(np.where(forward, val, -val), 1)
    return m - m.T


def _string_ops(n: int, kind: str):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    first = 1 if kind in ("xx", "xy") else 0
    other = 1 - first
    types = [first]
    sites = [0]
    for j in range(1, n):
        types += [other, first]
        sites += [j, j]
    last = other if kind in ("xx", "yy") else first
    types.append(last)
    sites.append(n)
    return types, sites


def assemble_string_matrix(kernel: ContractionKernel, n: int, kind: str) -> np.ndarray:
    """2n x 2n skew matrix of contractions along the operator string of ``kind``."""
    if not (1 <= n <= kernel.n_sites - 1):
        raise SeparationOutOfRange(f"n must be in 1..{kernel.n_sites - 1}, got {n}")
    types, sites = _string_ops(n, kind)
    return _skew_from_ops(kernel, types, sites)


def full_contraction_matrix(kernel: ContractionKernel) -> np.ndarray:
    """2N x 2N contraction matrix in the order A1, B1, A2, B2, ..., AN, BN."""
    n = kernel.n_sites
    return _skew_from_ops(kernel, np.tile([0, 1], n), np.repeat(np.arange(n), 2))


def prefactor(n, kind: str):
    sign = (-1.0) ** np.asarray(n)
    return {"xx": 0.25 + 0 * sign, "yy": 0.25 * sign,
            "xy": -0.25j + 0 * sign, "yx": 0.25j * sign}[kind]


def gzz(kernel: ContractionKernel, n) -> float | np.ndarray:
    """1/4 Pfaffian over (A1, B1, A(n+1), B(n+1)), expanded in closed form."""
    n_arr = np.atleast_1d(np.asarray(n))
    if np.any(n_arr < 1) or np.any(n_arr > kernel.n_sites - 1):
        raise SeparationOutOfRange(f"n must be in 1..{kernel.n_sites - 1}, got {n}")
    ab0 = kernel.ab[0]
    val = 0.25 * (ab0 * ab0 - kernel.aa[n_arr] ** 2 + kernel.ab[n_arr] * kernel.ba[n_arr])
    val = _real(val, "zz")
    return float(val[0]) if np.ndim(n) == 0 else val


def _real(values, label):
    values = np.asarray(values)
    worst = np.max(np.abs(values.imag)) if values.size else 0.0
    if worst >= RESIDUE_TOL:
        raise ImaginaryResidue(f"{label}: imaginary residue {worst:.3g}")
    return values.real.copy()


# Q-order indices of the two operator sequences. Leading blocks of length
# 2n give the xx (resp. yy) strings; replacing the last entry by the next one
# gives xy (resp. yx). The index missing from each sequence is ``z``.
def _sequence(n_sites: int, start_b: bool):
    head = 1 if start_b else 0
    body = [q for j in range(1, n_sites)
            for q in ((2 * j, 2 * j + 1) if start_b else (2 * j + 1, 2 * j))]
    return np.array([head] + body), 1 - head


def _perm_sign(x) -> int:
    order = np.argsort(x, kind="stable")
    seen = np.zeros(len(order), dtype=bool)
    sign = 1
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=32)
def _complement_signs(n_sites: int, start_b: bool, first_n: int):
    """Signs turning backward-pass Pfaffians into forward ones for n >= first_n.

    Uses the complementary-minor identity
    pf(M_I) = (-1)^(sum(I) + N) pf(M) pf((M^-1)_{I^c}) for a 2N x 2N matrix
    with 0-based index sums, together with M^-1 = E M E (E = +1 on A,
    -1 on B), which holds for the contraction matrix of a pure Gaussian state.
    """
    seq, z = _sequence(n_sites, start_b)
    rev = np.concatenate(([z], seq[::-1]))
    e = np.tile([1, -1], n_sites)
    out = np.empty((n_sites - first_n, 2))
    for row, n in enumerate(range(first_n, n_sites)):
        j = n_sites - n
        for kind in (0, 1):
            x = seq[:2 * n] if kind == 0 else np.append(seq[:2 * n - 1], seq[2 * n])
            y = rev[:2 * j] if kind == 0 else np.append(rev[:2 * j - 1], rev[2 * j])
            sign = _perm_sign(x) * _perm_sign(y) * np.prod(e[y])
            sign *= (-1) ** ((int(np.sum(x)) + n_sites) % 2)
            out[row, kind] = sign
    return out


def _nested_string_pfaffians(mq: np.ndarray, n_sites: int, start_b: bool, parity: float):
    """Leading-block Pfaffians for all n via a forward and a backward pass."""
    seq, z = _sequence(n_sites, start_b)
    half = n_sites // 2
    n_fwd = half + 1
    size = 2 * n_fwd + 1
    ev, od = nested_pfaffians(mq[np.ix_(seq[:size], seq[:size])], n_fwd)

    rev = np.concatenate(([z], seq[::-1]))
    n_bwd = n_sites - half
    size_b = min(2 * n_bwd + 1, len(rev))
    evb, odb = nested_pfaffians(mq[np.ix_(rev[:size_b], rev[:size_b])], n_bwd)

    signs = _complement_signs(n_sites, start_b, half)
    # n = half .. N-1 maps to backward index j - 1 = N - n - 1
    back_idx = n_sites - np.arange(half, n_sites) - 1
    ev_tail = signs[:, 0] * parity * evb[back_idx]
    od_tail = signs[:, 1] * parity * odb[back_idx]

    # forward covers n = 1..half+1, tail covers n = half..N-1
    head = np.concatenate((ev[half - 1:half + 1], od[half - 1:half + 1]))
    tail = np.concatenate((ev_tail[:2], od_tail[:2]))
    if not np.all(np.isfinite(head)) or not np.all(np.isfinite(tail)):
        return None
    if np.any(np.abs(head - tail) > OVERLAP_RTOL * np.abs(tail) + OVERLAP_ATOL):
        return None
    even = np.concatenate((ev[:half], ev_tail[1:]))
    odd = np.concatenate((od[:half], od_tail[1:]))
    return even, odd


def _direct_pfaffians(kernel: ContractionKernel, kind: str) -> np.ndarray:
    return np.array([pfaffian(assemble_string_matrix(kernel, n, kind))
                     for n in range(1, kernel.n_sites)])


def correlators_at(kernel: ContractionKernel, method: str = "auto") -> CorrelatorSet:
    """All five correlator families at the kernel's time.

    ``method="direct"`` evaluates one pivoted Pfaffian per separation and
    string. ``method="nested"`` gets every separation from two unpivoted
    elimination passes over the full contraction matrix, one from each end,
    and falls back to the direct route when the two passes disagree where
    they overlap. ``"auto"`` picks nested for chains longer than 8 sites.
    """
    n_sites = kernel.n_sites
    if method == "auto":
        method = "direct" if n_sites <= DIRECT_MAX_SITES else "nested"
    if method not in ("direct", "nested"):
        raise ValueError(f"unknown method {method!r}")

    pf = None
    if method == "nested" and n_sites >= 4:
        mq = full_contraction_matrix(kernel)
        parity = kernel.parity
        if parity is None:
            parity = 1.0 if pfaffian(mq).real >= 0 else -1.0
        x_part = _nested_string_pfaffians(mq, n_sites, True, parity)
        y_part = _nested_string_pfaffians(mq, n_sites, False, parity) if x_part else None
        if x_part and y_part:
            pf = {"xx": x_part[0], "xy": x_part[1], "yy": y_part[0], "yx": y_part[1]}
    if pf is None:
        pf = {kind: _direct_pfaffians(kernel, kind) for kind in KINDS}

    n = np.arange(1, n_sites)
    g = {kind: _real(prefactor(n, kind) * pf[kind], kind) for kind in KINDS}
    return CorrelatorSet(gxx=g["xx"], gyy=g["yy"], gxy=g["xy"], gyx=g["yx"],
                         gzz=gzz(kernel, n))
