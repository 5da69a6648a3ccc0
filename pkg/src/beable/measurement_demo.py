"""Born-rule recovery for an object read out by an apparatus.

An outcome pattern acts as ``F_j = G_down o (Pi_j (x) A)``: project the object
onto ``|j>``, let the apparatus evolve under a trace-preserving map ``A``, then
apply any trace-preserving map ``G_down`` to the whole.  Because only trace
preservation of ``A`` and ``G_down`` is used, the probability of the pattern is
the object's diagonal entry whatever the apparatus state and the coherences.

Channels are superoperator matrices in the row-major convention of
:mod:`beable.superoperators`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError
from .fock_algebra import StateOperator
from .superoperators import Superoperator, dual, sandwich

TP_TOL = 1e-10


# ------------------------------------------------------------- states

def _validate_density(rho, tol=1e-12) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError("density matrix must be square")
    if abs(np.trace(rho) - 1) > tol:
        raise DomainError(f"trace must be 1, got {np.trace(rho)}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix must be Hermitian")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -tol:
        raise DomainError("density matrix must be positive semidefinite")
    return rho


@dataclass(frozen=True, eq=False)
class CompositeState:
    """Density matrix on ``object (x) apparatus``."""

    dim_object: int
    dim_apparatus: int
    rho: np.ndarray

    def __post_init__(self):
        d = self.dim_object * self.dim_apparatus
        rho = _validate_density(self.rho)
        if rho.shape != (d, d):
            raise DomainError(f"rho has shape {rho.shape}, expected ({d}, {d})")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.dim_object * self.dim_apparatus


def _as_array(rho) -> np.ndarray:
    return rho.rho if isinstance(rho, StateOperator) else _validate_density(rho)


def compose(rho_object, rho_apparatus) -> CompositeState:
    """``rho_object (x) rho_apparatus``; accepts :class:`StateOperator` or arrays."""
    ro, ra = _as_array(rho_object), _as_array(rho_apparatus)
    return CompositeState(ro.shape[0], ra.shape[0], np.kron(ro, ra))


def partial_trace(state: CompositeState, keep: str = "object") -> np.ndarray:
    do, da = state.dim_object, state.dim_apparatus
    r = state.rho.reshape(do, da, do, da)
    if keep == "object":
        return np.einsum("iaja->ij", r)
    if keep == "apparatus":
        return np.einsum("iaib->ab", r)
    raise DomainError("keep must be 'object' or 'apparatus'")


# ----------------------------------------------------------- channels

def kraus_channel(kraus: Sequence[np.ndarray]) -> Superoperator:
    """``X -> sum_k A_k X A_k^dag``."""
    if len(kraus) == 0:
        raise DomainError("need at least one Kraus operator")
    out = sum(sandwich(A, np.asarray(A).conj().T) for A in kraus)
    return Superoperator(out)


def is_trace_preserving(G: Superoperator, tol: float = TP_TOL) -> bool:
    """``dual(G)(I) = I``, equivalent to ``Tr G(X) = Tr X`` for every ``X``."""
    return bool(np.max(np.abs(dual(G)(np.eye(G.n)) - np.eye(G.n))) <= tol)


def identity_channel(d: int) -> Superoperator:
    return Superoperator.identity(d)


def unitary_channel(U) -> Superoperator:
    U = np.asarray(U, dtype=complex)
    return kraus_channel([U])


def dephasing_channel(dim_object: int, dim_apparatus: int) -> Superoperator:
    """Complete dephasing of the object in its computational basis."""
    ks = []
    for j in range(dim_object):
        P = np.zeros((dim_object, dim_object))
        P[j, j] = 1.0
        ks.append(np.kron(P, np.eye(dim_apparatus)))
    return kraus_channel(ks)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Qm, R = np.linalg.qr(Z)
    return Qm * (np.diag(R) / np.abs(np.diag(R)))


def random_channel(d: int, rng: np.random.Generator, n_kraus: int = 3) -> Superoperator:
    """Trace-preserving map from the blocks of a random isometry ``C^d -> C^(d n)``."""
    V = random_unitary(d * n_kraus, rng)[:, :d]
    return kraus_channel([V[k * d : (k + 1) * d] for k in range(n_kraus)])


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    Z = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = Z @ Z.conj().T
    return rho / np.trace(rho)


def apply_stable_channel(state: CompositeState, G: Superoperator) -> CompositeState:
    """Apply a trace-preserving map to the composite state.

    Raises
    ------
    DomainError
        If ``G`` does not preserve the trace or has the wrong dimension.
    """
    if G.n != state.dim:
        raise DomainError(f"channel acts on dimension {G.n}, state has {state.dim}")
    if not is_trace_preserving(G):
        raise DomainError("channel is not trace preserving")
    out = G(state.rho)
    out = 0.5 * (out + out.conj().T)
    return CompositeState(state.dim_object, state.dim_apparatus, out)


# ------------------------------------------------------------ patterns

@dataclass(frozen=True, eq=False)
class OutcomePattern:
    """Selective operation ``G_down o (Pi_j (x) A)`` for object level ``j``.

    ``apparatus_map`` acts on the apparatus alone and ``downstream`` on the
    composite; both must be trace preserving.  ``downstream = None`` means the
    identity.
    """

    object_index: int
    dim_object: int
    apparatus_map: Superoperator
    downstream: Superoperator | None = None

    def __post_init__(self):
        if not 0 <= self.object_index < self.dim_object:
            raise DomainError("object_index out of range")
        if not is_trace_preserving(self.apparatus_map):
            raise DomainError("apparatus map is not trace preserving")
        if self.downstream is not None:
            if self.downstream.n != self.dim_object * self.apparatus_map.n:
                raise DomainError("downstream map has the wrong dimension")
            if not is_trace_preserving(self.downstream):
                raise DomainError("downstream map is not trace preserving")

    @property
    def dim_apparatus(self) -> int:
        return self.apparatus_map.n

    def selective(self) -> Superoperator:
        """Matrix of the whole pattern operation."""
        do, j = self.dim_object, self.object_index
        P = np.zeros((do, do))
        P[j, j] = 1.0
        proj = Superoperator(sandwich(P, P))
        # (S1 (x) S2) on row-major vec of a kron-structured operator
        da = self.dim_apparatus
        S1 = proj.matrix.reshape(do, do, do, do)
        S2 = self.apparatus_map.matrix.reshape(da, da, da, da)
        T = np.einsum("ijkl,abcd->iajbkcld", S1, S2).reshape((do * da) ** 2, (do * da) ** 2)
        local = Superoperator(T)
        return local if self.downstream is None else self.downstream @ local

    def __call__(self, X) -> np.ndarray:
        return self.selective()(X)


def outcome_probability(state: CompositeState, pattern: OutcomePattern) -> float:
    """``Tr[F_j rho]``."""
    if (state.dim_object, state.dim_apparatus) != (pattern.dim_object, pattern.dim_apparatus):
        raise DomainError("pattern and state dimensions differ")
    return float(np.real(np.trace(pattern(state.rho))))


def bilinear_form(pattern: OutcomePattern, rho_apparatus) -> np.ndarray:
    """``F[j', j] = Tr F(|j><j'| (x) rho_A)``, so that ``p = sum F[j', j] rho[j, j']``."""
    ra = np.asarray(rho_apparatus, dtype=complex)
    do = pattern.dim_object
    S = pattern.selective()
    F = np.empty((do, do), dtype=complex)
    for j in range(do):
        for jp in range(do):
            E = np.zeros((do, do))
            E[j, jp] = 1.0
            F[jp, j] = np.trace(S(np.kron(E, ra)))
    return F


class BornReport(NamedTuple):
    trials: int
    max_deviation: float        # max |p_j - rho_jj|
    min_probability: float
    max_sum_error: float        # max |sum_j p_j - 1|
    max_bilinear_deviation: float
    apparatus_independent: bool


def born_rule_report(dim_object: int, dim_apparatus: int, trials: int, seed: int) -> BornReport:
    """Random objects, apparatus states and trace-preserving maps; compare the
    pattern probabilities with the object diagonal."""
    if trials < 1:
        raise DomainError("trials must be positive")
    if dim_object < 1 or dim_apparatus < 1:
        raise DomainError("dimensions must be positive")
    rng = np.random.default_rng(seed)
    do, da = dim_object, dim_apparatus
    dev = bil = sum_err = 0.0
    pmin = np.inf
    for _ in range(trials):
        ro = random_density(do, rng)
        ra = random_density(da, rng)
        state = CompositeState(do, da, np.kron(ro, ra))
        A = random_channel(da, rng)
        Gd = random_channel(do * da, rng)
        ps = []
        for j in range(do):
            pat = OutcomePattern(j, do, A, Gd)
            p = outcome_probability(state, pat)
            ps.append(p)
            dev = max(dev, abs(p - ro[j, j].real))
            F = bilinear_form(pat, ra)
            bil = max(bil, abs(np.sum(F * ro.T) - p))
        pmin = min(pmin, min(ps))
        sum_err = max(sum_err, abs(sum(ps) - 1.0))
    return BornReport(trials, float(dev), float(pmin), float(sum_err), float(bil), bool(dev < 1e-10))
