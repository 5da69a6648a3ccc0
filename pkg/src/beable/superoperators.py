"""Generators of the monitored oscillator and their audits.

Superoperators act on row-major vectorized operators, ``vec(X) = X.reshape(-1)``,
so that ``vec(A X B) = (A kron B^T) vec(X)``.

The dissipators below are built from the time-zero operators.  For the free
oscillator the Heisenberg-picture dynamics with time-dependent operators is reproduced by
adding the free motion ``-i[H, .]`` (pass ``H`` to :func:`propagate`); the
dissipator part alone is what the conservation audits act on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, NumericError
from .fock_algebra import StateOperator, _check_square, _rho, pure_state


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on ``n x n`` operators stored as an ``n^2 x n^2`` matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = m.shape[0]
        n = int(round(np.sqrt(d)))
        if m.ndim != 2 or m.shape != (d, d) or n * n != d:
            raise DomainError(f"superoperator matrix must be n^2 x n^2, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        """Operator-space dimension ``n^2``."""
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        """Hilbert-space dimension."""
        return int(round(np.sqrt(self.dim)))

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(_rho(X))
        if X.shape != (self.n, self.n):
            raise DomainError(f"operator shape {X.shape} does not match n={self.n}")
        return (self.matrix @ X.reshape(-1)).reshape(self.n, self.n)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.matrix + other.matrix)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.matrix - other.matrix)

    def __mul__(self, c) -> "Superoperator":
        return Superoperator(c * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.matrix @ other.matrix)

    @classmethod
    def identity(cls, n: int) -> "Superoperator":
        return cls(np.eye(n * n, dtype=complex))

    @classmethod
    def zero(cls, n: int) -> "Superoperator":
        return cls(np.zeros((n * n, n * n), dtype=complex))


def left(A) -> np.ndarray:
    """Matrix of ``X -> A X``."""
    A = np.asarray(A)
    return np.kron(A, np.eye(A.shape[0]))


def right(B) -> np.ndarray:
    """Matrix of ``X -> X B``."""
    B = np.asarray(B)
    return np.kron(np.eye(B.shape[0]), B.T)


def commutator(A) -> np.ndarray:
    """Matrix of ``X -> [A, X]``."""
    return left(A) - right(A)


def sandwich(A, B) -> np.ndarray:
    """Matrix of ``X -> A X B``."""
    return np.kron(np.asarray(A), np.asarray(B).T)


def double_commutator(A) -> Superoperator:
    C = commutator(A)
    return Superoperator(C @ C)


def lindblad_original(Q, alpha: float) -> Superoperator:
    """Position dephasing ``L rho = -(alpha/4) [Q, [Q, rho]]`` with ``alpha > 0``."""
    Q = _check_square(Q, "Q")
    if not alpha > 0:
        raise DomainError("alpha must be positive for the original dissipator")
    return -(alpha / 4.0) * double_commutator(Q)


def lindblad_modified(Q, P, omega: float, gamma: float) -> Superoperator:
    """Signed dissipator ``-(gamma/4)([P,[P,rho]] - omega^2 [Q,[Q,rho]])``.

    It is trace preserving and leaves the free Hamiltonian invariant, but is not
    completely positive.
    """
    Q = _check_square(Q, "Q")
    P = _check_square(P, "P")
    if Q.shape != P.shape:
        raise DomainError("Q and P dimensions differ")
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    if not omega > 0:
        raise DomainError("omega must be positive")
    return -(gamma / 4.0) * (double_commutator(P) - omega**2 * double_commutator(Q))


def hamiltonian_part(H) -> Superoperator:
    """Free motion ``rho -> -i [H, rho]``."""
    H = _check_square(H, "H")
    return Superoperator(-1j * commutator(H))


def dissipator(R_ops: Sequence, coefficients: Sequence[float]) -> Superoperator:
    """``-sum_s alpha_s (R^dag R rho + rho R^dag R - 2 R rho R^dag)``.

    Signed coefficients are accepted.
    """
    if len(R_ops) == 0:
        raise DomainError("R_ops must be nonempty")
    if len(R_ops) != len(coefficients):
        raise DomainError("R_ops and coefficients differ in length")
    n = _check_square(R_ops[0], "R").shape[0]
    out = np.zeros((n * n, n * n), dtype=complex)
    for R, c in zip(R_ops, coefficients):
        R = _check_square(R, "R")
        if R.shape != (n, n):
            raise DomainError("R_ops have mixed dimensions")
        RdR = R.conj().T @ R
        out -= c * (left(RdR) + right(RdR) - 2.0 * sandwich(R, R.conj().T))
    return Superoperator(out)


@dataclass(frozen=True)
class GeneratorSpec:
    """Description of a characteristic-functional generator.

    Parameters
    ----------
    form : {'gaussian', 'poissonian'}
    R_ops : sequence of ndarray
    coefficients : sequence of float
        One per channel; may be negative.
    xi : sequence of float, optional
        Drive value per channel, zero when omitted.
    local_quadratic : bool
        Include the ``-xi^2/(4 alpha)`` term of the Gaussian form.  Set it to
        ``False`` in the modified formalism, where the quadratic drive term is
        nonlocal in time and is carried by the path-integral layer instead.
    """

    form: str
    R_ops: tuple
    coefficients: tuple
    xi: tuple | None = None
    local_quadratic: bool = True

    def __post_init__(self):
        if self.form not in ("gaussian", "poissonian"):
            raise DomainError(f"unknown generator form {self.form!r}")
        object.__setattr__(self, "R_ops", tuple(np.asarray(R) for R in self.R_ops))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.R_ops) == 0:
            raise DomainError("R_ops must be nonempty")
        if len(self.R_ops) != len(self.coefficients):
            raise DomainError("R_ops and coefficients differ in length")
        if self.xi is not None:
            object.__setattr__(self, "xi", tuple(float(x) for x in self.xi))
            if len(self.xi) != len(self.R_ops):
                raise DomainError("xi must have one entry per channel")


def generator(spec: GeneratorSpec, xi: Sequence[float] | None = None) -> Superoperator:
    """Build ``K(xi)`` for the Gaussian or Poissonian form.

    ``xi`` overrides ``spec.xi``.  At ``xi = 0`` both forms reduce to
    :func:`dissipator` of the same channels.
    """
    if xi is None:
        xi = spec.xi if spec.xi is not None else (0.0,) * len(spec.R_ops)
    if len(xi) != len(spec.R_ops):
        raise DomainError("xi must have one entry per channel")
    L = dissipator(spec.R_ops, spec.coefficients)
    n = L.n
    out = L.matrix.copy()
    eye = np.eye(n * n)
    for R, a, x in zip(spec.R_ops, spec.coefficients, xi):
        if x == 0.0:
            continue
        if spec.form == "gaussian":
            # -i xi (R rho + rho R^dag) - xi^2/(4 alpha) rho
            out += -1j * x * (left(R) + right(R.conj().T))
            if spec.local_quadratic:
                if a == 0.0:
                    raise DomainError("zero coefficient with local quadratic drive")
                out += -(x * x) / (4.0 * a) * eye
        else:
            if a == 0.0:
                raise DomainError("zero coefficient in the Poissonian form")
            out += 2.0 * a * (np.exp(-1j * x / (2.0 * a)) - 1.0) * sandwich(R, R.conj().T)
    return Superoperator(out)


def dual(S: Superoperator) -> Superoperator:
    """Dual map with ``Tr[B S(X)] = Tr[dual(S)(B) X]``."""
    n = S.n
    S4 = S.matrix.reshape(n, n, n, n)
    return Superoperator(S4.transpose(3, 2, 1, 0).reshape(n * n, n * n))


class EvolutionResult(NamedTuple):
    times: np.ndarray
    states: list
    energy_series: np.ndarray
    min_eigenvalue_series: np.ndarray
    trace_drift: float


def total_generator(L: Superoperator, H=None) -> Superoperator:
    return L if H is None else L + hamiltonian_part(H)


def propagate(L: Superoperator, rho0, t_final: float, steps: int, H=None) -> EvolutionResult:
    """Sample ``exp(L_tot t) rho0`` on ``steps + 1`` uniformly spaced times.

    Parameters
    ----------
    L : Superoperator
        Dissipative part of the generator.
    rho0 : StateOperator or ndarray
    t_final : float
    steps : int
        Number of output intervals; does not affect accuracy, since every step
        applies the same exact one-step propagator.
    H : ndarray, optional
        Free Hamiltonian.  When given, ``-i[H, .]`` is added to ``L`` and the
        energy series ``Tr(H rho(t))`` is recorded; otherwise the energy series
        is empty.

    Returns
    -------
    EvolutionResult
    """
    if steps < 1 or int(steps) != steps:
        raise DomainError("steps must be a positive integer")
    if not t_final > 0:
        raise DomainError("t_final must be positive")
    r0 = np.asarray(_rho(rho0), dtype=complex)
    n = r0.shape[0]
    if L.n != n:
        raise DomainError("state and generator dimensions differ")
    Ltot = total_generator(L, H)
    dt = t_final / steps
    U = expm(Ltot.matrix * dt)
    if not np.all(np.isfinite(U)):
        raise NumericError(
            f"matrix exponential not finite (dt={dt:g}, ||L||_1={np.abs(Ltot.matrix).sum(0).max():.3g})"
        )
    times = np.linspace(0.0, t_final, steps + 1)
    v = r0.reshape(-1)
    states, energy, mins = [], [], []
    drift = 0.0
    for k in range(steps + 1):
        if k:
            v = U @ v
        rho = v.reshape(n, n)
        states.append(rho)
        drift = max(drift, abs(np.trace(rho) - 1.0))
        mins.append(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        if H is not None:
            energy.append(np.real(np.sum(np.asarray(H) * rho.T)))
    if drift > 1e-9:
        growth = float(np.max(np.linalg.eigvals(Ltot.matrix).real))
        raise NumericError(
            f"trace drift {drift:.3e} exceeds 1e-9; max Re spectrum of the truncated "
            f"generator is {growth:.3g} (signed generators are unstable on a truncated "
            f"Fock space, use evolve_moments)"
        )
    return EvolutionResult(times, states, np.array(energy), np.array(mins), float(drift))


def fit_slope(t, y) -> float:
    """Least-squares slope of ``y`` against ``t``."""
    return float(np.polyfit(np.asarray(t, float), np.asarray(y, float), 1)[0])


def energy_drift(L: Superoperator, H, rho) -> float:
    """Instantaneous ``d<H>/dt = Tr[dual(L)(H) rho]``."""
    return float(np.real(np.sum(dual(L)(H) * np.asarray(_rho(rho)).T)))


def positivity_probe(L: Superoperator, rho0, eps: float) -> float:
    """Smallest eigenvalue of ``(I + eps L) rho0``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    r = np.asarray(_rho(rho0), dtype=complex)
    s = r + eps * L(r)
    return float(np.linalg.eigvalsh(0.5 * (s + s.conj().T))[0])


class WitnessScan(NamedTuple):
    min_eigenvalue: float
    state: np.ndarray
    n_scanned: int


def positivity_witness_scan(
    L: Superoperator, eps: float, n_random: int = 200, seed: int = 0, levels: int | None = None
) -> WitnessScan:
    """Search pure states for the most negative :func:`positivity_probe` value.

    Scans all two-level superpositions ``(|m> + |n>)/sqrt(2)`` and ``n_random``
    seeded Haar-like random vectors, all supported on the lowest ``levels``
    levels (default: all but the top two).
    """
    n = L.n
    levels = n - 2 if levels is None else levels
    if not 1 <= levels <= n:
        raise DomainError("levels out of range")
    rng = np.random.default_rng(seed)
    candidates = []
    for i in range(levels):
        for j in range(i + 1, levels):
            v = np.zeros(n, complex)
            v[i] = v[j] = 1.0
            candidates.append(v)
    for _ in range(n_random):
        v = np.zeros(n, complex)
        v[:levels] = rng.standard_normal(levels) + 1j * rng.standard_normal(levels)
        candidates.append(v)
    best, best_v = np.inf, None
    for v in candidates:
        val = positivity_probe(L, pure_state(v), eps)
        if val < best:
            best, best_v = val, v / np.linalg.norm(v)
    return WitnessScan(best, best_v, len(candidates))


class Trajectory(NamedTuple):
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray


def mean_trajectory(L: Superoperator, Q, P, rho0, t_final: float, steps: int, H=None) -> Trajectory:
    """``<Q>(t)`` and ``<P>(t)`` along :func:`propagate`."""
    res = propagate(L, rho0, t_final, steps, H=H)
    Qt, Pt = np.asarray(Q).T, np.asarray(P).T
    q = np.array([np.real(np.sum(Qt * r)) for r in res.states])
    p = np.array([np.real(np.sum(Pt * r)) for r in res.states])
    return Trajectory(res.times, q, p)


class CosineFit(NamedTuple):
    amplitude: float
    phase: float
    residual: float


def fit_cosine(t, q, omega: float) -> CosineFit:
    """Fit ``C cos(omega t + delta)``; residual is ``max|q - fit| / C``."""
    t = np.asarray(t, float)
    A = np.column_stack([np.cos(omega * t), np.sin(omega * t)])
    (c, s), *_ = np.linalg.lstsq(A, np.asarray(q, float), rcond=None)
    C = float(np.hypot(c, s))
    delta = float(np.arctan2(-s, c))
    resid = float(np.max(np.abs(A @ np.array([c, s]) - q)))
    return CosineFit(C, delta, resid / C if C > 0 else resid)


# Heisenberg-picture moments.  The span of {I, Q, P, Q^2, P^2, (QP+PQ)/2} is
# closed under the free motion and under dissipators whose channels are linear
# in Q and P, so its moments obey a 6x6 linear system that needs no Fock
# truncation beyond the initial expectation values.

MOMENT_LABELS = ("I", "Q", "P", "QQ", "PP", "QP_sym")


def quadratic_basis(Q, P) -> list:
    n = np.asarray(Q).shape[0]
    return [np.eye(n), Q, P, Q @ Q, P @ P, 0.5 * (Q @ P + P @ Q)]


class MomentGenerator(NamedTuple):
    matrix: np.ndarray      # d m/dt = matrix @ m
    truncation_defect: float


def moment_generator(L: Superoperator, Q, P, H=None, safe: int | None = None) -> MomentGenerator:
    """Restrict ``dual(L_tot)`` to the quadratic span on the truncation-safe block.

    ``safe`` is the number of low levels used for the projection (default:
    all but the top four, since products of two ladder operators reach two
    levels up and the dual generator two more).
    """
    Ltot = total_generator(L, H)
    D = dual(Ltot)
    basis = quadratic_basis(Q, P)
    n = basis[0].shape[0]
    safe = n - 4 if safe is None else safe
    if safe < 3:
        raise DomainError("Fock space too small for the moment projection")
    cut = [b[:safe, :safe].reshape(-1) for b in basis]
    A = np.column_stack(cut)
    M = np.zeros((6, 6), dtype=complex)
    defect = 0.0
    for j, b in enumerate(basis):
        y = D(b)[:safe, :safe].reshape(-1)
        c, *_ = np.linalg.lstsq(A, y, rcond=None)
        defect = max(defect, float(np.max(np.abs(A @ c - y))))
        M[j] = c
    if defect > 1e-8:
        raise NumericError(
            f"generator does not close on the quadratic span (defect {defect:.3e})"
        )
    # Tr(B_j rho) evolves as sum_c M[j, c] Tr(B_c rho)
    if np.max(np.abs(M.imag)) > 1e-9:
        raise NumericError("moment generator has non-real coefficients")
    return MomentGenerator(M.real, defect)


class MomentEvolution(NamedTuple):
    times: np.ndarray
    moments: np.ndarray     # shape (len(times), 6), columns as MOMENT_LABELS
    energy_series: np.ndarray
    truncation_defect: float


def evolve_moments(L: Superoperator, Q, P, rho0, t_final: float, steps: int, omega: float,
                   H=None) -> MomentEvolution:
    """Exact Heisenberg-picture evolution of the quadratic moments.

    Stable for signed generators, whose Schrodinger-picture propagation on a
    truncated Fock space is exponentially unstable at the top levels.
    """
    if steps < 1:
        raise DomainError("steps must be positive")
    if not t_final > 0:
        raise DomainError("t_final must be positive")
    mg = moment_generator(L, Q, P, H=H)
    r = np.asarray(_rho(rho0))
    m0 = np.array([np.real(np.sum(b.T * r)) for b in quadratic_basis(Q, P)])
    times = np.linspace(0.0, t_final, steps + 1)
    U = expm(mg.matrix * (t_final / steps))
    out = np.empty((steps + 1, 6))
    out[0] = m0
    for k in range(1, steps + 1):
        out[k] = U @ out[k - 1]
    energy = 0.5 * (out[:, 4] + omega**2 * out[:, 3])
    return MomentEvolution(times, out, energy, mg.truncation_defect)


def mean_trajectory_heisenberg(L, Q, P, rho0, t_final, steps, omega, H=None) -> Trajectory:
    """``<Q>(t)``, ``<P>(t)`` from :func:`evolve_moments`."""
    ev = evolve_moments(L, Q, P, rho0, t_final, steps, omega, H=H)
    return Trajectory(ev.times, ev.moments[:, 1], ev.moments[:, 2])
