"""Dense brute-force references used by ``verify`` and the test-suite.

Nothing here shares code with the sparse builders or the Chebyshev kernel.
"""
from __future__ import annotations

import itertools

import numpy as np


def dense_time_marching(shape, r_a, r_h) -> np.ndarray:
    """Loop-by-loop forward-Euler operator; ``r_a[j][m]`` per dimension and point."""
    d = len(shape)
    n = int(np.prod(shape))
    strides = [int(np.prod(shape[:j])) for j in range(d)]
    A = np.zeros((n, n))
    for coords in itertools.product(*[range(k) for k in shape]):
        m = sum(c * s for c, s in zip(coords, strides))
        A[m, m] += 1 - 2 * d * r_h
        for j in range(d):
            lo = list(coords)
            hi = list(coords)
            lo[j] = (coords[j] - 1) % shape[j]
            hi[j] = (coords[j] + 1) % shape[j]
            A[m, sum(c * s for c, s in zip(lo, strides))] += r_h + r_a[j][m] / 2
            A[m, sum(c * s for c, s in zip(hi, strides))] += r_h - r_a[j][m] / 2
    return A


def dense_shift(shape, dim) -> np.ndarray:
    """``|i_dim - 1><i_dim|`` with wraparound, as an explicit permutation matrix."""
    n = int(np.prod(shape))
    strides = [int(np.prod(shape[:j])) for j in range(len(shape))]
    S = np.zeros((n, n))
    for coords in itertools.product(*[range(k) for k in shape]):
        src = sum(c * s for c, s in zip(coords, strides))
        tgt = list(coords)
        tgt[dim] = (coords[dim] - 1) % shape[dim]
        S[sum(c * s for c, s in zip(tgt, strides)), src] = 1.0
    return S


def dilation_dense(a_hat: np.ndarray) -> np.ndarray:
    n = a_hat.shape[0]
    z = np.zeros((n, n))
    return np.block([[z, -1j * a_hat.conj().T], [1j * a_hat, z]])


def eig_exponential(H: np.ndarray, theta: float = np.pi / 2) -> np.ndarray:
    """``exp(-i H theta)`` through the eigendecomposition of Hermitian ``H``."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * theta * w)) @ V.conj().T


def encoded_operator_svd(a_hat: np.ndarray, shifts, r_h: float) -> np.ndarray:
    """Closed form of the enacted step, ``(1-2dr_h) U sin(pi s/2) W^T + 2 r_h sum S_j``."""
    d = len(shifts)
    U, s, Wt = np.linalg.svd(a_hat)
    out = (1 - 2 * d * r_h) * (U * np.sin(np.pi * s / 2)) @ Wt
    for S in shifts:
        out = out + 2 * r_h * S
    return out


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi |a - e^{i phi} b|``."""
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
