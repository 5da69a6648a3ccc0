"""Discretized kinetic kernel of the time-sliced oscillator.

On a uniform grid of ``N`` steps the quadratic action is carried by the
``(N+1) x (N+1)`` tridiagonal matrix

    diag = (1 - lam, 2 - lam, ..., 2 - lam, 1),   off-diagonal = -1,

with ``lam = eps^2 omega^2``.  Dropping the last row and column gives the
reduced kernel ``Kbar``, whose inverse (times ``eps``) is the covariance ``G``
used to integrate out the drive variables.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import DomainError, NumericError


@dataclass(frozen=True)
class GridSpec:
    """Uniform time grid ``T = N eps``.

    ``N = 1`` is accepted so that single-step propagators can be described;
    the kernel builders themselves require ``N >= 2``.
    ``half_odd_regularized`` records whether ``omega T / 2 pi`` is a half-odd
    integer; it has no effect on the matrices.
    """

    N: int
    eps: float
    omega: float
    T: float
    half_odd_regularized: bool = field(default=False, compare=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer")
        if not self.eps > 0:
            raise DomainError("eps must be positive")
        if self.omega < 0:
            raise DomainError("omega must be non-negative")
        if abs(self.T - self.N * self.eps) >= 1e-12 * max(1.0, abs(self.T)):
            raise DomainError(f"T = {self.T} differs from N*eps = {self.N * self.eps}")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_T(cls, N: int, T: float, omega: float) -> "GridSpec":
        if not T > 0:
            raise DomainError("T must be positive")
        x = omega * T / (2 * np.pi) - 0.5
        half_odd = bool(omega > 0 and abs(x - round(x)) < 1e-12)
        return cls(N=N, eps=T / N, omega=omega, T=T, half_odd_regularized=half_odd)

    @property
    def lam(self) -> float:
        return (self.eps * self.omega) ** 2


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Real symmetric tridiagonal matrix stored densely."""

    entries: np.ndarray

    def __post_init__(self):
        K = np.array(self.entries, dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise DomainError("kernel must be square")
        if not np.array_equal(K, K.T):
            raise DomainError("kernel must be symmetric")
        if np.any(np.triu(K, 2)):
            raise DomainError("kernel must be tridiagonal")
        K.setflags(write=False)
        object.__setattr__(self, "entries", K)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries).copy()

    @property
    def offdiagonal(self) -> np.ndarray:
        return np.diag(self.entries, 1).copy()

    def det(self) -> float:
        """Determinant by the three-term continuant recurrence."""
        d, e = self.diagonal, self.offdiagonal
        p_prev, p = 1.0, d[0]
        for k in range(1, len(d)):
            p_prev, p = p, d[k] * p - e[k - 1] ** 2 * p_prev
        return float(p)


def build_K(grid: GridSpec, lam: float | None = None) -> KernelMatrix:
    """Kinetic kernel on ``N + 1`` nodes; ``lam`` overrides ``eps^2 omega^2``."""
    if grid.N < 2:
        raise DomainError("kernel needs N >= 2")
    lam = grid.lam if lam is None else float(lam)
    n = grid.N + 1
    d = np.full(n, 2.0 - lam)
    d[0] = 1.0 - lam
    d[-1] = 1.0
    K = np.diag(d) - np.eye(n, k=1) - np.eye(n, k=-1)
    return KernelMatrix(K)


def reduce(K: KernelMatrix) -> KernelMatrix:
    """Drop the last row and column."""
    if K.size < 3:
        raise DomainError("reduce needs a kernel of size >= 3")
    return KernelMatrix(K.entries[:-1, :-1])


def reduced_kernel(grid: GridSpec, lam: float | None = None) -> KernelMatrix:
    return reduce(build_K(grid, lam))


def recurrence_table(n_max: int) -> list[tuple[int, int, int]]:
    """``[(D_n, Dbar_n, Dbarbar_n) for n = 1..n_max]`` at ``lam = 0`` in one pass.

    ``Dbarbar`` is the determinant of the all-interior ``n x n`` block,
    ``Dbar`` that of the reduced kernel and ``D`` that of the full kernel on
    ``n`` nodes.  Python integers keep the recurrences exact for any ``n``.
    """
    if int(n_max) != n_max or n_max < 1:
        raise DomainError("n must be a positive integer")
    n_max = int(n_max)
    # Dbarbar_k = 2 Dbarbar_{k-1} - Dbarbar_{k-2}
    bb = [1, 2]
    for _ in range(2, n_max + 1):
        bb.append(2 * bb[-1] - bb[-2])
    # Dbar_k = Dbarbar_{k-1} - Dbarbar_{k-2}, Dbar_0 = Dbar_1 = 1
    dbar = [1, 1] + [bb[k - 1] - bb[k - 2] for k in range(2, n_max + 1)]
    # D_k = Dbar_{k-1} - Dbar_{k-2}; the one-node kernel is the zero Laplacian
    D = [0, 0] + [dbar[k - 1] - dbar[k - 2] for k in range(2, n_max + 1)]
    return [(D[n], dbar[n], bb[n]) for n in range(1, n_max + 1)]


def recurrence_determinants(n: int) -> tuple[int, int, int]:
    """Exact ``(D_n, Dbar_n, Dbarbar_n)`` at ``lam = 0``; see :func:`recurrence_table`."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    return recurrence_table(int(n))[-1]


def _polymul_linear(p: list, c0: int, c1: int) -> list:
    """``p(lam) * (c0 + c1 lam)`` for integer coefficient lists."""
    out = [0] * (len(p) + 1)
    for k, a in enumerate(p):
        out[k] += c0 * a
        out[k + 1] += c1 * a
    return out


def _polysub(p: list, q: list) -> list:
    m = max(len(p), len(q))
    return [(p[k] if k < len(p) else 0) - (q[k] if k < len(q) else 0) for k in range(m)]


def reduced_char_coefficients(n: int) -> list[int]:
    """Integer coefficients ``A_k`` with ``det Kbar_n(lam) = sum_k (-1)^k A_k lam^k``.

    ``Kbar_n(lam) = Kbar_n(0) - lam I``; computed by exact polynomial
    continuants, expanding from the first row.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    n = int(n)
    # T_m: determinant of the m x m block with diagonal 2 - lam
    T_prev, T = [1], [2, -1]
    Ts = [T_prev, T]
    for _ in range(2, n):
        T_prev, T = T, _polysub(_polymul_linear(T, 2, -1), T_prev)
        Ts.append(T)
    if n == 1:
        p = [1, -1]
    else:
        p = _polysub(_polymul_linear(Ts[n - 1], 1, -1), Ts[n - 2])
    return [(-1) ** k * c for k, c in enumerate(p)]


class ThresholdReport(tuple):
    """``(holds, bound, eig_min)`` with extra attributes.

    ``lam_condition`` is ``lam < bound`` and ``positive`` is the actual
    positivity ``eig_min > lam``.
    """

    def __new__(cls, holds: bool, bound: float, eig_min: float, lam: float):
        obj = super().__new__(cls, (holds, bound, eig_min))
        obj.holds, obj.bound, obj.eig_min, obj.lam = holds, bound, eig_min, lam
        obj.lam_condition = bool(lam < bound)
        obj.positive = bool(eig_min > lam)
        return obj


def positivity_threshold(grid: GridSpec) -> ThresholdReport:
    """Grid-size condition ``N > 2 omega^2 T^2`` and the actual spectrum.

    The condition implies ``eps^2 omega^2 < 1/(2(N-1)) = bound`` (the converse
    fails, e.g. ``N = 2``, ``omega T = 1``).  ``eig_min`` is the smallest
    eigenvalue of ``Kbar(0)``; the reduced kernel ``Kbar(lam) = Kbar(0) - lam I``
    is positive iff ``eig_min > lam``, reported as ``.positive``.  The grid-size
    condition is only a heuristic: it is neither necessary nor sufficient once
    ``omega T`` exceeds about ``pi/2``.
    """
    if grid.N < 2:
        raise DomainError("threshold needs N >= 2")
    N = grid.N
    bound = 1.0 / (2.0 * (N - 1))
    holds = bool(N > 2.0 * grid.omega**2 * grid.T**2)
    d = np.full(N, 2.0)
    d[0] = 1.0
    eig_min = float(eigvalsh_tridiagonal(d, -np.ones(N - 1), select="i", select_range=(0, 0))[0])
    return ThresholdReport(holds, bound, eig_min, grid.lam)


@dataclass(frozen=True, eq=False)
class InverseKernel:
    """``G = eps * Kbar^{-1}``."""

    entries: np.ndarray
    eps: float

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def _ldl_tridiagonal(d: np.ndarray, e: np.ndarray):
    """Pivots ``D`` and multipliers ``l`` of ``T = L D L^T``."""
    n = len(d)
    piv = np.empty(n)
    l = np.empty(max(n - 1, 0))
    piv[0] = d[0]
    for k in range(1, n):
        if not piv[k - 1] > 0:
            return piv, l, k - 1
        l[k - 1] = e[k - 1] / piv[k - 1]
        piv[k] = d[k] - l[k - 1] * e[k - 1]
    if not piv[-1] > 0:
        return piv, l, n - 1
    return piv, l, None


def invert_reduced(Kbar: KernelMatrix, eps: float) -> InverseKernel:
    """Invert the reduced kernel column by column through ``L D L^T``.

    Raises
    ------
    NumericError
        If a pivot is non-positive, i.e. ``Kbar`` is not positive definite
        (the grid is too coarse for the positivity threshold ``N > 2 omega^2 T^2``
        to deliver a positive kernel).
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    d, e = Kbar.diagonal, Kbar.offdiagonal
    piv, l, bad = _ldl_tridiagonal(d, e)
    if bad is not None:
        raise NumericError(
            f"reduced kernel is not positive definite (pivot {bad} = {piv[bad]:.3e}); "
            "refine the grid past the positivity threshold N > 2 omega^2 T^2"
        )
    n = len(d)
    X = np.eye(n)
    for k in range(1, n):           # forward: L y = b
        X[k] -= l[k - 1] * X[k - 1]
    X /= piv[:, None]               # D z = y
    for k in range(n - 2, -1, -1):  # backward: L^T x = z
        X[k] -= l[k] * X[k + 1]
    G = eps * 0.5 * (X + X.T)
    G.setflags(write=False)
    return InverseKernel(G, float(eps))


def quadratic_form(G: InverseKernel, xi) -> float:
    """``xi^T G xi``."""
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.shape[0] != G.size:
        raise DomainError(f"xi has length {xi.shape[0]}, expected {G.size}")
    return float(xi @ G.entries @ xi)
