"""Operators and states on a truncated harmonic-oscillator Fock space.

Units are hbar = 1 and unit oscillator mass.  The ladder convention is

    a = (omega Q + i P) / sqrt(2 omega),

so that ``Q = (a + a^dag)/sqrt(2 omega)`` and ``P = i sqrt(omega/2) (a^dag - a)``.
Operators are plain ``numpy`` arrays of shape ``(n_max + 1, n_max + 1)``.
Truncation only spoils the topmost level of ``[Q, P]``; the helpers below report
that defect rather than hide it.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationWarning

HERMITIAN_TOL = 1e-12


def _check_square(M, name="operator") -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"{name} must be a square matrix, got shape {M.shape}")
    if M.shape[0] < 2:
        raise DomainError(f"{name} must have dimension >= 2")
    return M


def is_hermitian(M, tol: float = HERMITIAN_TOL) -> bool:
    M = np.asarray(M)
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= tol)


@dataclass(frozen=True)
class LadderPair:
    """Annihilation and creation matrices on ``n_max + 1`` levels."""

    a: np.ndarray
    a_dagger: np.ndarray
    omega: float

    @property
    def dim(self) -> int:
        return self.a.shape[0]


def ladder(n_max: int, omega: float = 1.0) -> LadderPair:
    """Return the truncated ladder pair with ``a|n> = sqrt(n)|n-1>``."""
    if int(n_max) != n_max or n_max < 1:
        raise DomainError("n_max must be an integer >= 1")
    if not omega > 0:
        raise DomainError("omega must be positive")
    n_max = int(n_max)
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)
    return LadderPair(a=a, a_dagger=a.conj().T.copy(), omega=float(omega))


def build_canonical(n_max: int, omega: float) -> tuple[np.ndarray, np.ndarray]:
    """Position and momentum matrices in the truncated number basis.

    Parameters
    ----------
    n_max : int
        Highest retained level; the matrices have dimension ``n_max + 1``.
    omega : float
        Oscillator frequency, fixes the ladder convention.

    Returns
    -------
    Q, P : ndarray
        Hermitian matrices with ``[Q, P] = i`` everywhere except the last
        diagonal entry.
    """
    lp = ladder(n_max, omega)
    Q = (lp.a + lp.a_dagger) / np.sqrt(2.0 * omega)
    P = 1j * np.sqrt(omega / 2.0) * (lp.a_dagger - lp.a)
    return Q, P


def build_hamiltonian(Q, P, omega: float) -> np.ndarray:
    """``H = (P^2 + omega^2 Q^2)/2`` from matrices of matching dimension."""
    Q = _check_square(Q, "Q")
    P = _check_square(P, "P")
    if Q.shape != P.shape:
        raise DomainError(f"dimension mismatch: Q {Q.shape} vs P {P.shape}")
    if not omega > 0:
        raise DomainError("omega must be positive")
    H = 0.5 * (P @ P + omega**2 * (Q @ Q))
    return 0.5 * (H + H.conj().T)


def commutator_defect(Q, P, exclude_top: int = 0) -> float:
    """Max entry of ``[Q, P] - i I`` on the block that drops ``exclude_top`` levels."""
    Q = _check_square(Q, "Q")
    P = _check_square(P, "P")
    C = Q @ P - P @ Q - 1j * np.eye(Q.shape[0])
    m = Q.shape[0] - exclude_top
    if m <= 0:
        return 0.0
    return float(np.max(np.abs(C[:m, :m])))


@dataclass(frozen=True, eq=False)
class StateOperator:
    """Density matrix validated at construction.

    ``truncation_loss`` records the norm discarded when a state was cut to the
    retained levels (zero for states built directly from a matrix).  Positivity
    is only checked here; evolved states are stored as raw arrays because the
    signed generators do not preserve it.
    """

    rho: np.ndarray
    truncation_loss: float = 0.0

    def __post_init__(self):
        rho = np.array(_check_square(self.rho, "rho"), dtype=complex)
        if abs(np.trace(rho) - 1.0) > 1e-12:
            raise DomainError(f"trace must be 1, got {np.trace(rho)}")
        if not is_hermitian(rho):
            raise DomainError("rho must be Hermitian")
        evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if evals[0] < -1e-12:
            raise DomainError(f"rho has negative eigenvalue {evals[0]:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


def pure_state(psi) -> StateOperator:
    """Projector onto a (normalized here) state vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise DomainError("zero state vector")
    psi = psi / nrm
    return StateOperator(np.outer(psi, psi.conj()))


def fock_state(n: int, n_max: int) -> StateOperator:
    if not 0 <= n <= n_max:
        raise DomainError("level out of range")
    psi = np.zeros(n_max + 1, dtype=complex)
    psi[n] = 1.0
    return pure_state(psi)


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """Untruncated coherent-state amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)``."""
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        c[n] = c[n - 1] * alpha / np.sqrt(n)
    return c


def coherent_state(alpha: complex, n_max: int) -> StateOperator:
    """Coherent state ``|alpha><alpha|`` renormalized on the retained levels.

    A :class:`TruncationWarning` is issued when ``|alpha|^2 > n_max/4``; the
    state is still returned with its ``truncation_loss`` recorded.
    """
    if int(n_max) != n_max or n_max < 1:
        raise DomainError("n_max must be an integer >= 1")
    if abs(alpha) ** 2 > n_max / 4:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds n_max/4 = {n_max / 4:.3g}",
            TruncationWarning,
            stacklevel=2,
        )
    c = coherent_amplitudes(alpha, int(n_max))
    kept = float(np.vdot(c, c).real)
    psi = c / np.sqrt(kept)
    rho = np.outer(psi, psi.conj())
    return StateOperator(rho, truncation_loss=max(0.0, 1.0 - kept))


def _rho(rho) -> np.ndarray:
    return rho.rho if isinstance(rho, StateOperator) else np.asarray(rho)


def expectation(M, rho) -> complex:
    """``Tr(M rho)``; accepts :class:`StateOperator` or a raw matrix."""
    M = _check_square(M, "M")
    r = _rho(rho)
    if M.shape != r.shape:
        raise DomainError(f"dimension mismatch: {M.shape} vs {r.shape}")
    # trace of a product without forming it
    return complex(np.sum(M * r.T))
