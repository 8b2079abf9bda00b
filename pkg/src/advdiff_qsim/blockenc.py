"""Advection-like/shift splitting of the time-marching operator and its unitary dilation.

``A = (1 - 2 d r_h) A_hat + 2 r_h sum_j S_j`` where ``A_hat`` has a unit diagonal.
``A_hat`` is embedded in the Hermitian dilation

    H = [[0, -i A_hat^T], [i A_hat, 0]]

whose evolution ``exp(-i H pi/2)`` carries ``A_hat sinc(sqrt(A_hat^T A_hat) pi/2)``
in its lower-left block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.special import jv

from .errors import ConfigurationError, NumericalError, ShapeError
from .lattice import GridSpec, neighbor_index
from .stencil import SparseOperator, StabilityParams

THETA = np.pi / 2
DENSE_CAP = 512


def shift_operator(grid: GridSpec, dim: int) -> SparseOperator:
    """Cyclic permutation moving the amplitude at ``i_dim`` to ``i_dim - 1``."""
    if not 0 <= dim < grid.dims:
        raise IndexError(f"dimension {dim} outside [0, {grid.dims})")
    m = np.arange(grid.size)
    rows = neighbor_index(m, dim, -1, grid)
    return sp.csr_array((np.ones(grid.size), (rows, m)), shape=(grid.size, grid.size))


@dataclass(frozen=True)
class StepDecomposition:
    a_hat: SparseOperator
    shifts: tuple[SparseOperator, ...]
    kappa: np.ndarray
    normalization: float
    r_h: float

    @property
    def dims(self) -> int:
        return len(self.shifts)

    def recompose(self) -> SparseOperator:
        out = self.normalization * self.a_hat
        for s in self.shifts:
            out = out + 2 * self.r_h * s
        return sp.csr_array(out)


def decompose(A: SparseOperator, params: StabilityParams, grid: GridSpec) -> StepDecomposition:
    d = grid.dims
    if params.dims != d:
        raise ShapeError(f"parameters are {params.dims}-d, grid is {d}-d")
    if A.shape != (grid.size, grid.size):
        raise ShapeError(f"operator {A.shape} does not fit grid of {grid.size} points")
    norm = 1.0 - 2 * d * params.r_h
    if norm <= 0:
        raise ConfigurationError(f"normalization 1 - 2 d r_h = {norm} is not positive")
    shifts = tuple(shift_operator(grid, j) for j in range(d))
    k = 2 * params.r_h / norm
    a_hat = A / norm
    for s in shifts:
        a_hat = a_hat - k * s
    a_hat = sp.csr_array(a_hat)
    a_hat.sum_duplicates()
    a_hat.sort_indices()
    kappa = np.array([1.0] + [k] * d)
    return StepDecomposition(a_hat, shifts, kappa, norm, params.r_h)


@dataclass(frozen=True)
class BlockUnitary:
    """``exp(-i H theta)`` for the dilation of ``a_hat``; ``theta`` is pinned to pi/2."""

    a_hat: SparseOperator
    hamiltonian: SparseOperator = field(repr=False)
    a_hat_t: SparseOperator = field(repr=False)
    theta: float = THETA

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def spectral_bound(self) -> float:
        """Upper bound on ``|H|_2 = |A_hat|_2`` from ``sqrt(|A_hat|_1 |A_hat|_inf)``."""
        a = abs(self.a_hat)
        n1 = float(a.sum(axis=0).max())
        ninf = float(a.sum(axis=1).max())
        return math.sqrt(n1 * ninf)


def dilate(a_hat: SparseOperator) -> BlockUnitary:
    n, m = a_hat.shape
    if n != m:
        raise ShapeError("dilation needs a square operator")
    a_hat = sp.csr_array(a_hat)
    a_hat_t = sp.csr_array(a_hat.T)
    H = sp.block_array([[None, -1j * a_hat_t], [1j * a_hat, None]], format="csr")
    return BlockUnitary(a_hat, H, a_hat_t)


class ChebyshevPropagator:
    """Matrix-free ``exp(-i H theta) v`` by a Chebyshev expansion.

    With ``G = -i H = [[0, -A^T], [A, 0]]`` real and skew,

        exp(theta G) = J_0(z) + 2 sum_k J_k(z) M_k(G / lam),   z = lam * theta,

    where ``M_{k+1} = 2 x M_k + M_{k-1}`` are the Chebyshev polynomials
    evaluated on the imaginary axis. Every term is real, so real input stays
    real. ``lam`` bounds the spectral radius of ``H`` and the tail of Bessel
    coefficients bounds the truncation error.
    """

    def __init__(self, bu: BlockUnitary, tol: float = 1e-10, max_terms: int | None = None):
        self.bu = bu
        self.tol = tol
        self.lam = bu.spectral_bound() * (1 + 1e-12)
        if self.lam == 0:
            self.lam = 1.0
        cap = max_terms if max_terms is not None else 10 * math.ceil(math.sqrt(bu.dim))
        z = self.lam * bu.theta
        ks = np.arange(cap + 60)
        coeff = 2 * jv(ks, z)
        coeff[0] /= 2
        tails = np.cumsum(np.abs(coeff)[::-1])[::-1]
        # tails[k] bounds the error of keeping coefficients 0..k-1
        ok = np.nonzero(tails[1:] <= tol)[0]
        if ok.size == 0 or ok[0] + 1 > cap:
            residual = float(tails[min(cap, tails.size - 1)])
            raise NumericalError(
                f"Chebyshev expansion needs more than {cap} terms for tol={tol:g} "
                f"(lam*theta = {z:.3g})", residual=residual)
        self.n_terms = int(ok[0] + 1)
        self.coeff = coeff[: self.n_terms]
        self.error_bound = float(tails[self.n_terms]) if self.n_terms < tails.size else 0.0
        self.matvecs = 0

    def _g(self, x: np.ndarray) -> np.ndarray:
        # x has shape (2, N): rows are the ancilla-|0> and ancilla-|1> halves
        self.matvecs += 1
        out = np.empty_like(x)
        out[0] = -(self.bu.a_hat_t @ x[1])
        out[1] = self.bu.a_hat @ x[0]
        return out

    @property
    def matvecs_per_apply(self) -> int:
        return self.n_terms - 1

    def apply(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec)
        if vec.shape[-1] != self.bu.dim or vec.ndim != 1:
            raise ShapeError(f"state of length {vec.shape} does not match dilation dimension {self.bu.dim}")
        if np.iscomplexobj(vec) and not np.any(vec.imag):
            vec = vec.real
        x = vec.reshape(2, -1)
        inv = 1.0 / self.lam
        m_prev = x
        out = self.coeff[0] * m_prev
        if self.n_terms > 1:
            m_cur = self._g(x) * inv
            out = out + self.coeff[1] * m_cur
            for c in self.coeff[2:]:
                m_next = 2 * inv * self._g(m_cur) + m_prev
                out += c * m_next
                m_prev, m_cur = m_cur, m_next
        return out.reshape(-1).astype(complex)


def apply_block_unitary(state: np.ndarray, bu: BlockUnitary, tol: float = 1e-10) -> np.ndarray:
    """``exp(-i H pi/2) state`` to relative 2-norm accuracy ``tol``."""
    return ChebyshevPropagator(bu, tol).apply(state)


def encoded_operator_dense(decomp: StepDecomposition) -> np.ndarray:
    """The one-step operator the circuit actually enacts, built densely.

    Extracts the lower-left block of ``exp(-i H pi/2)`` and recombines it with
    the shifts: ``(1 - 2 d r_h) B + 2 r_h sum_j S_j``. Test-sized grids only.
    """
    n = decomp.a_hat.shape[0]
    if n > DENSE_CAP:
        raise ConfigurationError(f"dense encoding limited to N <= {DENSE_CAP}, got {n}")
    a = decomp.a_hat.toarray()
    G = np.block([[np.zeros((n, n)), -a.T], [a, np.zeros((n, n))]])
    U = scipy.linalg.expm(THETA * G)
    out = decomp.normalization * U[n:, :n]
    for s in decomp.shifts:
        out = out + 2 * decomp.r_h * s.toarray()
    return out
