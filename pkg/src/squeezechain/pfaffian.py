"""Pfaffians of complex skew-symmetric matrices."""
from __future__ import annotations

import numpy as np

from .errors import DimensionTooLarge, NotSkewSymmetric

SKEW_TOL = 1e-12
UNDERFLOW = 1e-300
ORACLE_MAX_DIM = 10


def as_skew(m, tol: float = SKEW_TOL) -> np.ndarray:
    """Return a complex copy of ``m`` after checking M = -M^T.

    The diagonal is zeroed exactly.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSkewSymmetric(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a + a.T)) >= tol:
        raise NotSkewSymmetric(f"|M + M^T|_max = {np.max(np.abs(a + a.T)):.3g}")
    np.fill_diagonal(a, 0.0)
    return a


def _pfaffian_inplace(a: np.ndarray) -> complex:
    n = a.shape[0]
    if n % 2:
        return 0j
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        pivot = a[k, k + 1]
        if abs(pivot) < UNDERFLOW:
            return 0j
        pf *= pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            v = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, v) - np.outer(v, tau)
    return complex(pf)


def pfaffian(m) -> complex:
    """Pfaffian by skew tridiagonalization with partial pivoting (Parlett-Reid).

    Odd dimensions give exactly 0. A vanishing pivot means the matrix is
    singular and 0 is returned. Dimensions 2 and 4 use the closed forms.
    """
    a = as_skew(m)
    if a.shape[0] == 2:
        return complex(a[0, 1])
    if a.shape[0] == 4:
        return complex(a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2])
    return _pfaffian_inplace(a)


def pfaffian_oracle(m) -> complex:
    """Recursive expansion along the first row. Exponential cost; dim <= 10."""
    a = as_skew(m)
    n = a.shape[0]
    if n > ORACLE_MAX_DIM:
        raise DimensionTooLarge(f"oracle limited to dim <= {ORACLE_MAX_DIM}, got {n}")
    return _expand(a, tuple(range(n)))


def _expand(a, idx):
    if not idx:
        return 1.0 + 0j
    if len(idx) % 2:
        return 0j
    first, rest = idx[0], idx[1:]
    total = 0j
    for j, col in enumerate(rest):
        if a[first, col] != 0:
            total += (-1) ** j * a[first, col] * _expand(a, rest[:j] + rest[j + 1:])
    return total


def nested_pfaffians(m: np.ndarray, n_pairs: int):
    """Pfaffians of the leading blocks of ``m`` without pivoting.

    Returns ``(even, odd)`` of length ``n_pairs`` where ``even[p]`` is the
    Pfaffian of the leading (2p+2)x(2p+2) block and ``odd[p]`` that of the
    same block with its last row/column replaced by index 2p+2.
    Needs ``m`` to be at least 2*n_pairs + 1 wide. Unpivoted elimination is
    only accurate while the leading Pfaffians stay away from zero; callers
    must cross-check.
    """
    a = np.array(m, dtype=complex)
    size = a.shape[0]
    even = np.empty(n_pairs, dtype=complex)
    odd = np.empty(n_pairs, dtype=complex)
    acc = 1.0 + 0j
    for p in range(n_pairs):
        j = 2 * p
        even[p] = acc * a[j, j + 1]
        odd[p] = acc * a[j, j + 2]
        pivot = a[j, j + 1]
        if abs(pivot) < UNDERFLOW:
            even[p + 1:] = np.nan
            odd[p + 1:] = np.nan
            break
        acc *= pivot
        if j + 2 < size:
            u = a[j + 2:, j].copy()
            v = a[j + 2:, j + 1].copy()
            a[j + 2:, j + 2:] += (np.outer(v, u) - np.outer(u, v)) / pivot
    return even, odd
