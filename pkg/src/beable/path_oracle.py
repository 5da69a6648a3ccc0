"""Gaussian path-integral oracles for the monitored oscillator.

Every integral here is Gaussian, so the time-sliced characteristic functional
and the density of the monitored history are evaluated exactly through one
complex-symmetric determinant and one linear solve.  The unmonitored Feynman
amplitude is composed slice by slice and compared with its closed form.  A
literal grid quadrature of the sliced exponent serves as an independent check
at small ``N``.

Conventions: ``hbar = 1``; the forward path carries ``exp(i m S)``, the
backward path the complex conjugate kernel with ``conj(m)``, so that ``m = i mu``
turns every integral into an absolutely convergent one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .discrete_kernel import GridSpec, build_K, invert_reduced, reduce
from .errors import DomainError, NumericError, SingularityError

# weight of the diagonal in the ordered double sum over drive pairs
PRIME_DIAGONAL_WEIGHT = 0.5


# ---------------------------------------------------------------- data types

@dataclass(frozen=True, eq=False)
class WorldLine:
    """Sampled history ``Q_0 .. Q_N`` on a grid."""

    values: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.shape[0] != self.grid.N + 1:
            raise DomainError(f"world line needs N+1 = {self.grid.N + 1} values, got {v.shape[0]}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return self.grid.eps * np.arange(self.grid.N + 1)


@dataclass(frozen=True)
class GaussianEndpointState:
    """Pure state ``psi(Q) = (2 pi w^2)^(-1/4) exp(-(Q-Q_c)^2/(4 w^2) + i P_c Q)``."""

    center_Q: float
    center_P: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("width must be positive")

    def wavefunction(self, Q):
        Q = np.asarray(Q, dtype=float)
        w2 = self.width**2
        return (2 * np.pi * w2) ** -0.25 * np.exp(
            -((Q - self.center_Q) ** 2) / (4 * w2) + 1j * self.center_P * Q
        )

    def kernel(self, Q, Qp):
        """``<Q|rho|Q'>``."""
        return self.wavefunction(Q) * np.conj(self.wavefunction(Qp))


@dataclass(frozen=True)
class GaussianMixture:
    """Incoherent mixture ``sum_k w_k |psi_k><psi_k|`` of Gaussian pure states."""

    states: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.states) == 0 or len(self.states) != len(self.weights):
            raise DomainError("mixture needs matching nonempty states and weights")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("mixture weights must be non-negative and sum to 1")
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    def kernel(self, Q, Qp):
        return sum(w * s.kernel(Q, Qp) for s, w in zip(self.states, self.weights))


class Amplitude(NamedTuple):
    value: complex
    prefactor_branch: int


# ---------------------------------------------------- unmonitored amplitudes

def _check_mass(mass) -> complex:
    m = complex(mass)
    if m == 0:
        raise DomainError("mass must be nonzero")
    if m.real == 0 and not m.imag > 0:
        raise DomainError("imaginary mass must be i*mu with mu > 0")
    return m


def feynman_exact(Q0: float, QF: float, tau: float, omega: float, mass: complex = 1.0) -> Amplitude:
    """Closed-form oscillator propagator ``<Q_F, tau | Q_0, 0>``.

    ``sqrt(m w / (2 pi i sin w tau)) exp{i m w [(Q^2 + Q_0^2) cos w tau - 2 Q Q_0] / (2 sin w tau)}``

    The square root is taken on the principal branch; ``prefactor_branch`` is
    ``floor(omega tau / pi)``, the number of caustics crossed, and is reported
    without attaching a Maslov phase to it.  The phase is evaluated in the form
    ``(Q - Q_0)^2 cos x - 4 Q Q_0 sin^2(x/2)``, which has a clean ``omega -> 0``
    limit.

    Raises
    ------
    SingularityError
        At a caustic, ``sin(omega tau) = 0`` with ``omega tau > 0``.
    """
    m = _check_mass(mass)
    if not tau > 0:
        raise DomainError("tau must be positive")
    if omega < 0:
        raise DomainError("omega must be non-negative")
    x = omega * tau
    s = np.sin(x)
    if x > 0 and abs(s) < 1e-12:
        raise SingularityError(f"caustic: sin(omega tau) = {s:.1e}")
    # omega / sin(omega tau) without cancellation at small omega
    w_over_s = 1.0 / (tau * np.sinc(x / np.pi))
    phase_num = (QF - Q0) ** 2 * np.cos(x) - 4.0 * QF * Q0 * np.sin(x / 2) ** 2
    pref = np.sqrt(m * w_over_s / (2j * np.pi))
    val = pref * np.exp(1j * m * w_over_s * phase_num / 2.0)
    return Amplitude(complex(val), int(np.floor(x / np.pi)))


def feynman_free(Q0: float, QF: float, tau: float, mass: complex = 1.0) -> complex:
    m = _check_mass(mass)
    return complex(np.sqrt(m / (2j * np.pi * tau)) * np.exp(1j * m * (QF - Q0) ** 2 / (2 * tau)))


def feynman_discrete(Q0: float, QF: float, grid: GridSpec, mass: complex = 1.0) -> Amplitude:
    """``N``-slice amplitude, each intermediate integral done exactly.

    The running kernel is kept as ``c exp(a Q^2 + b Q + d)``; one slice
    multiplies by the infinitesimal kernel and integrates the previous node.

    Raises
    ------
    NumericError
        If an intermediate quadratic coefficient degenerates.
    """
    m = _check_mass(mass)
    eps, w = grid.eps, grid.omega
    half = 1j * m / (2 * eps)
    norm = np.sqrt(m / (2j * np.pi * eps))
    # first slice, from Q0 to the running variable
    a = half
    b = -2.0 * half * Q0
    d = half * Q0**2 - 0.5j * m * eps * w**2 * Q0**2
    c = norm
    for _ in range(grid.N - 1):
        A = a + half * (1.0 - (eps * w) ** 2)
        if abs(A) < 1e-14 * abs(half):
            raise NumericError("degenerate quadratic coefficient in slice composition")
        if A.real > 0:
            raise NumericError("slice integral diverges (Re A > 0)")
        c = c * norm * np.sqrt(np.pi / (-A))
        a, b, d = half - half**2 / A, half * b / A, d - b**2 / (4 * A)
    val = c * np.exp(a * QF**2 + b * QF + d)
    branch = int(np.floor(grid.omega * grid.T / np.pi))
    return Amplitude(complex(val), branch)


# ---------------------------------------------------------- Gaussian algebra

def gaussian_integral(M, b, c=0.0) -> complex:
    """``int exp(-x^T M x / 2 + b^T x + c) dx`` over ``R^n``.

    ``M`` is complex symmetric with positive semidefinite real part; the
    determinant root follows the branch continuous from ``M = I``, which for
    such ``M`` is the product of principal roots of its eigenvalues.
    """
    M = np.asarray(M, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = M.shape[0]
    lam = np.linalg.eigvals(M)
    if np.min(np.abs(lam)) < 1e-13 * np.max(np.abs(lam)):
        raise NumericError("quadratic form is singular")
    if np.min(lam.real) < -1e-9 * np.max(np.abs(lam)):
        raise NumericError("quadratic form has eigenvalues with negative real part")
    logdet_half = 0.5 * np.sum(np.log(lam))
    y = np.linalg.solve(M, b)
    return complex(np.exp(0.5 * n * np.log(2 * np.pi) - logdet_half + 0.5 * b @ y + c))


def _endpoint_terms(rho0, N: int):
    """Quadratic data of one Gaussian pure state on the ``(Q_0, Q'_0)`` pair."""
    w2 = rho0.width**2
    mu, p = rho0.center_Q, rho0.center_P
    Mq = 1.0 / (2 * w2)
    b0 = mu / (2 * w2) + 1j * p
    b1 = mu / (2 * w2) - 1j * p
    c = -(mu**2) / (2 * w2) - 0.5 * np.log(2 * np.pi * w2)
    return Mq, b0, b1, c


def _path_quadratic(grid: GridSpec, gamma: float, mass: complex, QF: float, QFp: float):
    """``-x^T M x/2 + b^T x + c`` for the monitored double path, no drive.

    ``x = (Q_0..Q_{N-1}, Q'_0..Q'_{N-1})``; ``Q_N = Q_F``, ``Q'_N = Q'_F``.
    """
    N, eps = grid.N, grid.eps
    K = build_K(grid).entries
    m = complex(mass)
    # exponent z^T W z with z = (Q_0..Q_N, Q'_0..Q'_N)
    W = np.zeros((2 * N + 2, 2 * N + 2), dtype=complex)
    W[: N + 1, : N + 1] = (-gamma / 4 + 0.5j * m) * K / eps
    W[N + 1 :, N + 1 :] = (-gamma / 4 - 0.5j * np.conj(m)) * K / eps
    W[: N + 1, N + 1 :] = gamma / 4 * K / eps
    W[N + 1 :, : N + 1] = gamma / 4 * K / eps
    xi = np.r_[np.arange(N), N + 1 + np.arange(N)]
    fi = np.array([N, 2 * N + 1])
    zf = np.array([QF, QFp], dtype=complex)
    M = -2.0 * W[np.ix_(xi, xi)]
    b = 2.0 * W[np.ix_(xi, fi)] @ zf
    c = zf @ W[np.ix_(fi, fi)] @ zf
    # path-measure normalization of both branches
    c = c + N * np.log(abs(m) / (2 * np.pi * eps))
    return M, b, c


def _add_state(M, b, c, rho0, N):
    Mq, b0, b1, cs = _endpoint_terms(rho0, N)
    M = M.copy()
    b = b.copy()
    M[0, 0] += Mq
    M[N, N] += Mq
    b[0] += b0
    b[N] += b1
    return M, b, c + cs


def _components(rho0):
    if isinstance(rho0, GaussianMixture):
        return list(zip(rho0.states, rho0.weights))
    if isinstance(rho0, GaussianEndpointState):
        return [(rho0, 1.0)]
    raise DomainError("rho0 must be a GaussianEndpointState or GaussianMixture")


def prime_sum(G, xi) -> float:
    """``sum_i sum_{j<=i} G_ij xi_i xi_j`` with the diagonal weighted by
    :data:`PRIME_DIAGONAL_WEIGHT`."""
    G = np.asarray(G)
    xi = np.asarray(xi, dtype=float)
    diag = float(np.sum(np.diag(G) * xi**2))
    return 0.5 * (float(xi @ G @ xi) - diag) + PRIME_DIAGONAL_WEIGHT * diag


def _check_common(grid: GridSpec, gamma: float):
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    if grid.N < 2:
        raise DomainError("monitored path integral needs N >= 2")


def cfo_discrete(rho0, xi, grid: GridSpec, gamma: float, QF: float, QFprime: float,
                 mass: complex = 1.0) -> complex:
    """Time-sliced ``<Q_F| G(t_F, t_0; [xi]) rho_0 |Q'_F>``.

    The drive enters as ``-(i eps/2) sum_j xi_j (Q_j + Q'_j)`` and through the
    nonlocal term ``-(eps^2/(2 gamma)) sum_i sum'_{j<=i} G_ij xi_i xi_j`` with
    ``G = eps Kbar^{-1}``, evaluated as ``-(eps^2/(4 gamma)) xi^T G xi``.

    Raises
    ------
    NumericError
        If the reduced kernel is not positive or the quadratic block is singular.
    """
    _check_common(grid, gamma)
    N, eps = grid.N, grid.eps
    xi = np.zeros(N) if xi is None else np.asarray(xi, dtype=float).ravel()
    if xi.shape[0] != N:
        raise DomainError(f"xi needs N = {N} entries")
    M, b, c = _path_quadratic(grid, gamma, mass, QF, QFprime)
    if np.any(xi):
        G = invert_reduced(reduce(build_K(grid)), eps).entries
        b = b - 0.5j * eps * np.r_[xi, xi]
        c = c - eps**2 / (2 * gamma) * prime_sum(G, xi)
    total = 0j
    for s, w in _components(rho0):
        Ms, bs, cs = _add_state(M, b, c, s, N)
        total += w * gaussian_integral(Ms, bs, cs)
    return complex(total)


def _check_boundary(q: WorldLine, QF, QFp):
    target = 0.5 * (QF + QFp)
    if abs(q.values[-1] - target) > 1e-12 * max(1.0, abs(target)):
        raise DomainError(
            f"boundary condition q_N = (Q_F + Q'_F)/2 = {target} violated (q_N = {q.values[-1]})"
        )


def density_factor(rho0, q: WorldLine, gamma: float, QF: float, QFprime: float,
                   mass: complex = 1.0) -> complex:
    """``<Q_F| f(t_F, t_0; [q]) rho_0 |Q'_F>`` after integrating out the drive.

    The drive integral contributes
    ``(2 gamma/eps^2)^(N/2) det(Kbar)^(1/2) exp{-(gamma/eps) u^T Kbar u}`` with
    ``u_j = q_j - (Q_j + Q'_j)/2`` for ``j < N``.
    """
    _check_boundary(q, QF, QFprime)
    return complex(density_factor_batch(rho0, q.values[None, : q.grid.N], q.grid, gamma,
                                        QF, QFprime, mass)[0])


def density_factor_batch(rho0, q_rows, grid: GridSpec, gamma: float, QF: float, QFprime: float,
                         mass: complex = 1.0) -> np.ndarray:
    """:func:`density_factor` for many histories at once.

    ``q_rows`` has shape ``(n_lines, N)`` and holds ``q_0 .. q_{N-1}``; the
    endpoint ``q_N = (Q_F + Q'_F)/2`` is implied.
    """
    _check_common(grid, gamma)
    N, eps = grid.N, grid.eps
    q_rows = np.atleast_2d(np.asarray(q_rows, dtype=float))
    if q_rows.shape[1] != N:
        raise DomainError(f"q rows need N = {N} entries")
    Kb = reduce(build_K(grid))
    detK = Kb.det()
    if not detK > 0:
        raise NumericError("reduced kernel determinant is not positive")
    Kbar = Kb.entries
    M, b, c = _path_quadratic(grid, gamma, mass, QF, QFprime)
    S = np.hstack([np.eye(N), np.eye(N)])      # S x = Q_j + Q'_j
    M = M + (gamma / (2 * eps)) * S.T @ Kbar @ S
    B = b[None, :] + (gamma / eps) * q_rows @ (Kbar @ S)
    C = (c - (gamma / eps) * np.einsum("ri,ij,rj->r", q_rows, Kbar, q_rows)
         + 0.5 * N * np.log(2 * gamma / eps**2) + 0.5 * np.log(detK))
    total = np.zeros(q_rows.shape[0], dtype=complex)
    for s, w in _components(rho0):
        Ms, bs, cs = _add_state(M, np.zeros(2 * N, complex), 0.0, s, N)
        lam = np.linalg.eigvals(Ms)
        if np.min(lam.real) < -1e-9 * np.max(np.abs(lam)):
            raise NumericError("quadratic form has eigenvalues with negative real part")
        logpre = 0.5 * 2 * N * np.log(2 * np.pi) - 0.5 * np.sum(np.log(lam))
        Bs = B + bs[None, :]
        Y = np.linalg.solve(Ms, Bs.T).T
        total += w * np.exp(logpre + 0.5 * np.sum(Bs * Y, axis=1) + C + cs)
    return total


def density_diagonal_factorized(rho0, q: WorldLine, gamma: float, QF: float,
                                mass: float = 1.0) -> float:
    """Diagonal density as ``C |A|^2`` with ``C > 0``, real mass only.

    On ``Q_F = Q'_F`` the monitored exponent separates into one amplitude
    ``A = int dQ_0 psi(Q_0) int DQ exp{-(gamma/(2 eps)) X^T Kbar X + (i m/(2 eps)) Q^T K Q}``
    (``X = Q - q``) and its conjugate, which makes the result manifestly
    non-negative.
    """
    m = float(np.real(mass))
    if complex(mass).imag != 0 or m <= 0:
        raise DomainError("factorized route needs a positive real mass")
    grid = q.grid
    _check_common(grid, gamma)
    _check_boundary(q, QF, QF)
    N, eps = grid.N, grid.eps
    Kfull = build_K(grid).entries
    Kb = reduce(build_K(grid))
    Kbar = Kb.entries
    qq = q.values[:N]
    # variables Q_0..Q_{N-1}, Q_N = QF fixed
    M = (gamma / eps) * Kbar - (1j * m / eps) * Kfull[:N, :N]
    b = (gamma / eps) * Kbar @ qq + (1j * m / eps) * Kfull[:N, N] * QF
    c = -(gamma / (2 * eps)) * qq @ Kbar @ qq + (0.5j * m / eps) * Kfull[N, N] * QF**2
    total = 0.0
    for s, w in _components(rho0):
        w2 = s.width**2
        Ms = M.copy()
        bs = b.copy()
        # psi(Q0) = exp(-(Q0 - Qc)^2/(4 w^2) + i P Q0) / (2 pi w^2)^(1/4)
        Ms[0, 0] += 1.0 / (2 * w2)
        bs[0] += s.center_Q / (2 * w2) + 1j * s.center_P
        cs = c - s.center_Q**2 / (4 * w2) - 0.25 * np.log(2 * np.pi * w2)
        A = gaussian_integral(Ms, bs, cs)
        total += w * abs(A) ** 2
    pref = (m / (2 * np.pi * eps)) ** N * (2 * gamma / eps**2) ** (N / 2) * np.sqrt(Kb.det())
    return float(pref * total)


# ----------------------------------------------------- brute-force oracle

def literal_exponent(Q, Qp, xi, grid: GridSpec, gamma: float, mass: complex = 1.0):
    """Sliced exponent written as the explicit sum over time steps.

    ``Q`` and ``Qp`` have trailing axis ``N + 1`` (endpoints included) and may
    carry leading batch axes.
    """
    N, eps, w = grid.N, grid.eps, grid.omega
    m = complex(mass)
    dQ = np.diff(Q, axis=-1)
    dQp = np.diff(Qp, axis=-1)
    Qi, Qpi = Q[..., :N], Qp[..., :N]
    e = -gamma / 4 * (((dQ - dQp) ** 2) / eps - eps * w**2 * (Qi - Qpi) ** 2)
    e = e + 0.5j * m * (dQ**2 / eps - eps * w**2 * Qi**2)
    e = e - 0.5j * np.conj(m) * (dQp**2 / eps - eps * w**2 * Qpi**2)
    out = np.sum(e, axis=-1)
    xi = np.asarray(xi, dtype=float)
    if np.any(xi):
        out = out - 0.5j * eps * np.sum(xi * (Qi + Qpi), axis=-1)
        G = invert_reduced(reduce(build_K(grid)), eps).entries
        ps = 0.0
        for i in range(N):
            for j in range(i + 1):
                wgt = PRIME_DIAGONAL_WEIGHT if i == j else 1.0
                ps += wgt * G[i, j] * xi[i] * xi[j]
        out = out - eps**2 / (2 * gamma) * ps
    return out


class BruteForceResult(NamedTuple):
    value: complex
    points_per_axis: int
    span_sigma: float


def cfo_bruteforce(rho0: GaussianEndpointState, xi, grid: GridSpec, gamma: float, QF: float,
                   QFprime: float, mass: complex = 1j, points: int = 17, span: float = 6.0,
                   chunk: int = 2_000_000) -> BruteForceResult:
    """Grid quadrature of the sliced characteristic functional.

    The ``2N`` variables are whitened with a finite-difference Hessian of the
    real part of the literal log-integrand; a uniform tensor grid of
    ``points`` nodes spanning ``+-span`` standard deviations is summed.  Use
    an imaginary mass so that every direction is Gaussian-damped; with a real
    mass the directions along ``Q = Q'`` are pure Fresnel integrals.
    """
    _check_common(grid, gamma)
    N, eps = grid.N, grid.eps
    xi = np.zeros(N) if xi is None else np.asarray(xi, dtype=float)
    n = 2 * N
    m = complex(mass)
    norm_log = N * np.log(abs(m) / (2 * np.pi * eps))

    def log_f(x):
        x = np.atleast_2d(x)
        Q = np.concatenate([x[:, :N], np.full((x.shape[0], 1), QF)], axis=1)
        Qp = np.concatenate([x[:, N:], np.full((x.shape[0], 1), QFprime)], axis=1)
        return (literal_exponent(Q, Qp, xi, grid, gamma, m)
                + np.log(rho0.kernel(x[:, 0], x[:, N]) + 0j))

    def re_log(x):
        return np.real(log_f(x))[0]

    # real part is an exact quadratic, so a Newton step from 0 with a finite
    # difference Hessian lands on the centre
    h = 1e-3
    x0 = np.zeros(n)
    H = np.empty((n, n))
    g = np.empty(n)
    E = np.eye(n) * h
    for i in range(n):
        g[i] = (re_log(x0 + E[i]) - re_log(x0 - E[i])) / (2 * h)
        for j in range(i, n):
            H[i, j] = H[j, i] = (
                re_log(x0 + E[i] + E[j]) - re_log(x0 + E[i] - E[j])
                - re_log(x0 - E[i] + E[j]) + re_log(x0 - E[i] - E[j])
            ) / (4 * h * h)
    Hn = -H
    evals, evecs = np.linalg.eigh(Hn)
    if evals[0] <= 0:
        raise NumericError("log-integrand is not concave; use an imaginary mass")
    center = np.linalg.solve(Hn, g)
    Tm = evecs / np.sqrt(evals)               # x = center + Tm y, y ~ N(0, I)
    nodes = np.linspace(-span, span, points)
    dy = nodes[1] - nodes[0]
    jac = abs(np.linalg.det(Tm)) * dy**n
    total = 0j
    grids = np.stack(np.meshgrid(*([nodes] * n), indexing="ij"), axis=-1).reshape(-1, n)
    for start in range(0, grids.shape[0], chunk):
        y = grids[start : start + chunk]
        x = center + y @ Tm.T
        total += np.sum(np.exp(log_f(x)))
    return BruteForceResult(complex(total * jac * np.exp(norm_log)), points, span)


# ------------------------------------------------------ world-line spectra

def _interp_second(x):
    """``(cos x - sin x / x)`` with its small-``x`` series."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    out[small] = -(xs**2) / 3 + xs**4 / 30
    xl = x[~small]
    out[~small] = np.cos(xl) - np.sin(xl) / xl
    return out


def interpolant_fourier(line: WorldLine, k: float, split: bool = False):
    """Fourier coefficient ``T^(-1/2) int_0^T exp(-i k t) Q(t) dt`` of the
    piecewise-linear interpolant, in closed form.

    With ``split=True`` the contributions of the node averages and of the
    increments are returned separately.
    """
    grid = line.grid
    eps, T = grid.eps, grid.T
    Q = line.values
    t = line.times
    mid = 0.5 * (t[1:] + t[:-1])
    avg = 0.5 * (Q[1:] + Q[:-1])
    inc = np.diff(Q)
    x = k * eps / 2.0
    ph = np.exp(-1j * k * mid)
    first = np.sum(ph * avg) * eps * np.sinc(x / np.pi)
    if k == 0:
        second = 0j
    else:
        # (i/k)(cos x - sinc x) = (i eps/2) (cos x - sinc x)/x ; series keeps it finite
        second = np.sum(ph * inc) * 1j * (eps / 2.0) * float(_interp_second(np.array([x]))[0] / x)
    first, second = first / np.sqrt(T), second / np.sqrt(T)
    if split:
        return complex(first), complex(second)
    return complex(first + second)


def classical_solution(grid: GridSpec, Q0: float, QF: float) -> np.ndarray:
    """Samples of the classical path with the given endpoints."""
    t = grid.eps * np.arange(grid.N + 1)
    w, T = grid.omega, grid.T
    if w == 0:
        return Q0 + (QF - Q0) * t / T
    s = np.sin(w * T)
    if abs(s) < 1e-12:
        raise SingularityError("classical boundary problem is singular at sin(omega T) = 0")
    return (Q0 * np.sin(w * (T - t)) + QF * np.sin(w * t)) / s


def brownian_bridge_family(T: float, omega: float, Q0: float = 0.0, QF: float = 1.0):
    """Lines with ``O(sqrt(eps))`` increments pinned at both ends (Brownian bridge
    around the classical path)."""

    def make(N: int, rng: np.random.Generator) -> WorldLine:
        g = GridSpec.from_T(N, T, omega)
        steps = np.sqrt(g.eps) * rng.standard_normal(N)
        W = np.r_[0.0, np.cumsum(steps)]
        t = g.eps * np.arange(N + 1)
        bridge = W - t / T * W[-1]
        return WorldLine(classical_solution(g, Q0, QF) + bridge, g)

    return make


def white_noise_family(T: float, omega: float, Q0: float = 0.0, QF: float = 1.0):
    """Classical path plus independent ``O(sqrt(eps))`` node deviations."""

    def make(N: int, rng: np.random.Generator) -> WorldLine:
        g = GridSpec.from_T(N, T, omega)
        dev = np.sqrt(g.eps) * rng.standard_normal(N + 1)
        dev[0] = dev[-1] = 0.0
        return WorldLine(classical_solution(g, Q0, QF) + dev, g)

    return make


class LowFreqScan(NamedTuple):
    N: np.ndarray
    residual: np.ndarray          # ensemble mean of max_{|k|<omega} |Q~_k|
    slope: float                  # of log residual against log N


def lowfreq_residual(line: WorldLine, n_k: int = 33) -> float:
    """``max_{|k|<omega} |Q~_k|`` of the line minus the classical solution."""
    g = line.grid
    cl = classical_solution(g, line.values[0], line.values[-1])
    dev = WorldLine(line.values - cl, g)
    ks = np.linspace(-g.omega, g.omega, n_k)
    return float(max(abs(interpolant_fourier(dev, k)) for k in ks))


def lowfreq_scan(line_family: Callable, omega: float, Ns: Sequence[int] = (64, 256, 1024),
                 seeds: int = 50, seed: int = 0, n_k: int = 33) -> LowFreqScan:
    """Ensemble low-frequency content of a family of world lines versus ``N``.

    ``line_family(N, rng)`` returns a :class:`WorldLine`; its grid frequency
    should equal ``omega``.
    """
    if seeds < 1:
        raise DomainError("seeds must be positive")
    if len(set(int(N) for N in Ns)) < 2:
        raise DomainError("need at least two distinct N to fit a slope")
    res = []
    for N in Ns:
        rng = np.random.default_rng([seed, int(N)])
        vals = []
        for _ in range(seeds):
            line = line_family(int(N), rng)
            if abs(line.grid.omega - omega) > 1e-12:
                raise DomainError("line family frequency differs from omega")
            vals.append(lowfreq_residual(line, n_k))
        res.append(np.mean(vals))
    Ns_a = np.asarray(Ns, dtype=float)
    res = np.asarray(res)
    slope = float(np.polyfit(np.log(Ns_a), np.log(res), 1)[0])
    return LowFreqScan(Ns_a.astype(int), res, slope)
