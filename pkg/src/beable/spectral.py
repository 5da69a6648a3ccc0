"""Principal-value kernels, weight functions and the physical bound chain.

The filtered variance of a monitored quantity carries the quadratic form

    G_hh = int dk |h~(k)|^2 P 1/(k^2 - omega^2),

which must be positive for the weight ``h`` to be admissible.  Fourier
transforms are unitary, ``h~(k) = (2 pi)^(-1/2) int h(t) exp(-i k t) dt`` in one
dimension and ``(2 pi)^(-2) int d^4x`` in four, so that ``h~(0) = (2 pi)^(-1/2)``
(or ``(2 pi)^(-2)``) for a normalized weight.  Four-vectors use the metric
``diag(1, -1, -1, -1)`` and ``k^2 = k0^2 - |k|^2``.

Unit conversions between cgs and natural (cm) units use
``hbar c = 3.1615e-17 erg cm``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
import warnings
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import minimize_scalar
from scipy.special import dawsn

from .errors import DomainError, NumericError, SingularityError

HBAR_C_ERG_CM = 3.1615e-17
STEFAN_BOLTZMANN_ERG = 7.56e-15       # u(T) = a T^4 in erg cm^-3
STEFAN_BOLTZMANN_NATURAL = 2.39e2     # same in cm^-4, rounded as usually quoted
STATED_U300_NATURAL = 1.44e18         # cm^-4, the value commonly quoted at 300 K

TIME_KINDS = ("box", "gauss", "modulated_gauss")
KINDS = TIME_KINDS + ("modulated_gauss_4d",)


def _quad(*args, **kw):
    """``scipy.integrate.quad`` with roundoff warnings silenced; callers carry
    their own error certificates."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(*args, **kw)


# ------------------------------------------------------------ weights

def _gauss_cosh(k, b, c):
    """``exp(-b k^2) cosh(c k)`` without overflow at large ``|k|``."""
    k = np.abs(np.asarray(k, dtype=float))
    return 0.5 * (np.exp(-b * k**2 + c * k) + np.exp(-b * k**2 - c * k))


@dataclass(frozen=True)
class WeightFunction:
    """Parametric averaging weight with a closed-form transform.

    ``box``: ``1/tau`` on ``|t| < tau/2``.
    ``gauss``: ``exp(-t^2/tau^2)/(tau sqrt(pi))``.
    ``modulated_gauss``: ``A exp(-t^2/tau^2) cos(kbar t)`` with
    ``A = exp(kbar^2 tau^2/4)/(tau sqrt(pi))``.
    ``modulated_gauss_4d``: the modulated profile times ``exp(-|x|^2/a^2)/(pi^(3/2) a^3)``.

    ``center`` shifts the time argument.  ``normalization`` is the integral of
    the weight (1 for every kind, kept for reporting).
    """

    kind: str
    tau: float
    kbar: float = 0.0
    a: float | None = None
    center: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown weight kind {self.kind!r}")
        if not self.tau > 0:
            raise DomainError("tau must be positive")
        if self.kbar < 0:
            raise DomainError("kbar must be non-negative")
        if self.kind == "modulated_gauss_4d":
            if self.a is None or not self.a > 0:
                raise DomainError("the 4d weight needs a positive spatial width a")
        if self.kind in ("box", "gauss") and self.kbar != 0:
            raise DomainError(f"{self.kind} weight takes no modulation")

    @property
    def normalization(self) -> float:
        return 1.0

    @property
    def amplitude(self) -> float:
        """Prefactor ``A`` of the time profile."""
        if self.kind == "box":
            return 1.0 / self.tau
        return np.exp(self.kbar**2 * self.tau**2 / 4) / (self.tau * np.sqrt(np.pi))

    def __call__(self, t):
        """Time profile (time kinds, and the temporal factor of the 4d kind)."""
        t = np.asarray(t, dtype=float) - self.center
        if self.kind == "box":
            return np.where(np.abs(t) < self.tau / 2, 1.0 / self.tau, 0.0)
        g = self.amplitude * np.exp(-(t**2) / self.tau**2)
        return g * np.cos(self.kbar * t) if self.kbar else g

    def spatial(self, r):
        if self.kind != "modulated_gauss_4d":
            raise DomainError("spatial profile only for the 4d kind")
        r = np.asarray(r, dtype=float)
        return np.exp(-(r**2) / self.a**2) / (np.pi**1.5 * self.a**3)

    def ft_time(self, k):
        """Unitary transform of the time profile, centred at ``t = 0``."""
        k = np.asarray(k, dtype=float)
        c = 1.0 / np.sqrt(2 * np.pi)
        if self.kind == "box":
            return c * np.sinc(k * self.tau / (2 * np.pi))
        return c * _gauss_cosh(k, self.tau**2 / 4, self.kbar * self.tau**2 / 2)

    def ft(self, k0, kappa=None):
        """Closed-form transform; ``kappa`` is ``|k|`` for the 4d kind."""
        if self.kind != "modulated_gauss_4d":
            if kappa is not None:
                raise DomainError("time weights take a single frequency argument")
            return self.ft_time(k0)
        if kappa is None:
            raise DomainError("4d weight needs |k|")
        kappa = np.asarray(kappa, dtype=float)
        return (np.sqrt(2 * np.pi) * self.ft_time(k0)) * np.exp(-(self.a**2) * kappa**2 / 4) / (
            4 * np.pi**2
        )

    def ft_squared_time(self, k):
        return self.ft_time(k) ** 2

    def autocorrelation(self, u):
        """``C(u) = int h(t) h(t + u) dt`` of the time profile."""
        u = np.abs(np.asarray(u, dtype=float))
        tau = self.tau
        if self.kind == "box":
            return np.where(u < tau, (tau - u) / tau**2, 0.0)
        A = self.amplitude
        base = A**2 * np.exp(-(u**2) / (2 * tau**2)) * tau * np.sqrt(np.pi / 2)
        if not self.kbar:
            return base
        return 0.5 * base * (np.exp(-self.kbar**2 * tau**2 / 2) + np.cos(self.kbar * u))


def ft_modulated(h: WeightFunction, k):
    """``(2 pi)^(-1/2) exp(-tau^2 k^2/4) cosh(k kbar tau^2/2)``."""
    if h.kind != "modulated_gauss":
        raise DomainError("ft_modulated needs a modulated_gauss weight")
    return h.ft_time(k)


def modulated_peak(h: WeightFunction) -> float:
    """Positive-frequency maximum of :func:`ft_modulated` (0 if there is none)."""
    if h.kind != "modulated_gauss":
        raise DomainError("modulated_peak needs a modulated_gauss weight")
    if h.kbar * h.tau <= np.sqrt(2):
        return 0.0
    # stationary point of k tau^2/2 = (kbar tau^2/2) tanh(k kbar tau^2/2)
    res = minimize_scalar(lambda k: -h.ft_time(k), bounds=(1e-9, 2 * h.kbar + 4 / h.tau),
                          method="bounded", options={"xatol": 1e-12 / h.tau})
    return float(res.x)


# ------------------------------------------------------- PV quadrature

@dataclass(frozen=True)
class PVQuadratureConfig:
    """Principal-value rules.

    ``exclusion_halfwidth`` is relative to ``max(1, |pole|)``.  Inside each
    window the pole part ``r/(k - k0)`` is subtracted and the regular remainder
    integrated with ``grid_points`` Gauss-Legendre nodes.  The result is
    recomputed with the window halved; the difference plus the reported
    quadrature error is the error estimate, which must stay below
    ``tolerance``.
    """

    exclusion_halfwidth: float = 1e-2
    grid_points: int = 32
    outer_cutoff: float = np.inf
    tolerance: float = 1e-9
    limit: int = 500

    def __post_init__(self):
        if not self.exclusion_halfwidth > 0:
            raise DomainError("exclusion_halfwidth must be positive")
        if self.grid_points < 2 or self.grid_points % 2:
            raise DomainError("grid_points must be an even integer >= 2")
        if not self.outer_cutoff > 0:
            raise DomainError("outer_cutoff must be positive")
        if not self.tolerance > 0:
            raise DomainError("tolerance must be positive")


class KernelValue(NamedTuple):
    value: float
    error_estimate: float


def _pv_once(f, poles, lo, hi, delta_rel, cfg: PVQuadratureConfig):
    xg, wg = np.polynomial.legendre.leggauss(cfg.grid_points)
    edges = [lo]
    window_total = 0.0
    for p in poles:
        d = delta_rel * max(1.0, abs(p))
        if not (lo < p - d and p + d < hi):
            raise DomainError(f"pole {p} too close to the integration bounds")
        if p - d < edges[-1]:
            raise DomainError("exclusion windows overlap; reduce exclusion_halfwidth")
        r = d * (f(p + d) - f(p - d)) / 2.0
        k = p + d * xg
        window_total += d * float(np.sum(wg * (np.array([f(x) for x in k]) - r / (k - p))))
        edges += [p - d, p + d]
    edges.append(hi)
    outer, err = 0.0, 0.0
    for a, b in zip(edges[0::2], edges[1::2]):
        v, e = _quad(f, a, b, limit=cfg.limit, epsabs=cfg.tolerance / 20, epsrel=1e-12)
        outer += v
        err += e
    return outer + window_total, err


def pv_integral(f: Callable[[float], float], singularities: Sequence[float],
                config: PVQuadratureConfig | None = None, lower: float | None = None,
                upper: float | None = None) -> KernelValue:
    """Principal value of ``int f`` through simple poles.

    Raises
    ------
    NumericError
        If halving the exclusion window moves the result by more than the
        tolerance.
    """
    cfg = config or PVQuadratureConfig()
    lo = -cfg.outer_cutoff if lower is None else lower
    hi = cfg.outer_cutoff if upper is None else upper
    poles = sorted(float(p) for p in singularities)
    v1, e1 = _pv_once(f, poles, lo, hi, cfg.exclusion_halfwidth, cfg)
    v2, e2 = _pv_once(f, poles, lo, hi, cfg.exclusion_halfwidth / 2, cfg)
    err = abs(v1 - v2) + max(e1, e2)
    if err > cfg.tolerance * max(1.0, abs(v2)):
        raise NumericError(f"PV quadrature not converged: estimate {v2:.6e}, error {err:.2e}")
    return KernelValue(float(v2), float(err))


# ---------------------------------------------------------- 1d kernels

def _check_time_weight(h: WeightFunction):
    if h.kind not in TIME_KINDS:
        raise DomainError(f"time kernel needs a time weight, got {h.kind}")


def g_hh_time(h: WeightFunction, omega: float, config: PVQuadratureConfig | None = None) -> KernelValue:
    """``int dk |h~(k)|^2 P 1/(k^2 - omega^2)`` by pole-subtracted quadrature."""
    _check_time_weight(h)
    if not omega > 0:
        raise DomainError("omega must be positive")
    cfg = config or PVQuadratureConfig()
    # the half-line window around omega must stay clear of k = 0
    if cfg.exclusion_halfwidth > omega / 4:
        cfg = replace(cfg, exclusion_halfwidth=omega / 4)

    def f(k):
        return h.ft_time(k) ** 2 / (k * k - omega * omega)

    # even integrand: twice the half line
    half = pv_integral(f, [omega], cfg, lower=0.0, upper=cfg.outer_cutoff)
    return KernelValue(2 * half.value, 2 * half.error_estimate)


def _gauss_shift_pv(b, s, E):
    """``PV int exp(-b (k - s)^2) / (k^2 - E^2) dk`` through Dawson's function."""
    sb = np.sqrt(b)
    return -(np.sqrt(np.pi) / E) * (dawsn(sb * (E + s)) + dawsn(sb * (E - s)))


def _modulated_sq_pieces(tau, kbar):
    """``exp(-tau^2 k^2/2) cosh^2(k kbar tau^2/2)`` as a sum of shifted Gaussians."""
    b = tau**2 / 2
    if kbar == 0:
        return b, [(0.0, 1.0)]
    big = 0.25 * np.exp(kbar**2 * tau**2 / 2)
    return b, [(kbar, big), (-kbar, big), (0.0, 0.5)]


def g_hh_time_closed(h: WeightFunction, omega: float) -> float:
    """Closed form of :func:`g_hh_time`.

    Gaussian kinds use Dawson's function; the box uses the time-domain result
    ``-(omega tau - sin omega tau)/(omega^3 tau^2)``.
    """
    _check_time_weight(h)
    if not omega > 0:
        raise DomainError("omega must be positive")
    if h.kind == "box":
        x = omega * h.tau
        return float(-(x - np.sin(x)) / (omega**3 * h.tau**2))
    b, pieces = _modulated_sq_pieces(h.tau, h.kbar)
    return float(sum(c * _gauss_shift_pv(b, s, omega) for s, c in pieces) / (2 * np.pi))


def g_hh_time_domain(h: WeightFunction, omega: float) -> float:
    """``int dt dt' h(t) G(t-t') h(t')`` with ``G(t) = -sin(omega |t|)/(2 omega)``."""
    _check_time_weight(h)
    upper = h.tau if h.kind == "box" else 12 * h.tau
    v, _ = _quad(lambda u: h.autocorrelation(u) * np.sin(omega * u), 0, upper,
                          limit=500, epsabs=1e-14, epsrel=1e-12)
    return float(-v / omega)


def g_hh_time_discrete(h: WeightFunction, omega: float, T: float) -> float:
    """Finite-time Fourier sum over ``k_n = 2 pi n / T``.

    ``omega T / (2 pi)`` must be a half-odd integer, so that no bin sits on the
    resonance and the bins straddle it symmetrically.
    """
    _check_time_weight(h)
    x = omega * T / (2 * np.pi) - 0.5
    if abs(x - round(x)) > 1e-9:
        raise DomainError("omega T / 2 pi must be a half-odd integer")
    dk = 2 * np.pi / T
    kmax = 60.0 / h.tau + 4 * h.kbar
    n = np.arange(-int(kmax / dk) - 1, int(kmax / dk) + 2)
    k = n * dk
    return float(dk * np.sum(h.ft_time(k) ** 2 / (k**2 - omega**2)))


def g_rs_matrix(h_list: Sequence[WeightFunction], omega: float,
                config: PVQuadratureConfig | None = None) -> np.ndarray:
    """``G_rs = int dk h~_r^* h~_s P 1/(k^2 - omega^2)`` for weights at their
    ``center`` times."""
    cfg = config or PVQuadratureConfig()
    n = len(h_list)
    if n == 0:
        raise DomainError("need at least one weight")
    for h in h_list:
        _check_time_weight(h)
    G = np.empty((n, n))
    for r in range(n):
        for s in range(r, n):
            hr, hs = h_list[r], h_list[s]
            dt = hr.center - hs.center

            def f(k, hr=hr, hs=hs, dt=dt):
                return hr.ft_time(k) * hs.ft_time(k) * np.cos(k * dt) / (k * k - omega * omega)

            v = pv_integral(f, [omega], cfg, lower=0.0, upper=cfg.outer_cutoff)
            G[r, s] = G[s, r] = 2 * v.value
    return G


def is_admissible(h: WeightFunction, omega: float, config: PVQuadratureConfig | None = None) -> bool:
    return g_hh_time(h, omega, config).value > 0


def variance_filtered(h: WeightFunction, coupling: float, quantum_var: float, formalism: str,
                      omega: float, config: PVQuadratureConfig | None = None) -> float:
    """Variance of the filtered history: intrinsic part plus the quantum variance.

    ``original``: ``1/(2 alpha tau) + quantum_var`` for a box weight.
    ``modified``: ``G_hh/gamma + quantum_var``; an inadmissible weight
    (``G_hh <= 0``) is rejected.
    """
    if not coupling > 0:
        raise DomainError("coupling must be positive")
    if formalism == "original":
        if h.kind != "box":
            raise DomainError("the original-formalism variance assumes a box weight")
        return 1.0 / (2 * coupling * h.tau) + quantum_var
    if formalism == "modified":
        g = g_hh_time(h, omega, config).value
        if not g > 0:
            raise DomainError(f"weight is not admissible: G_hh = {g:.4g} <= 0")
        return g / coupling + quantum_var
    raise DomainError(f"unknown formalism {formalism!r}")


def mean_filtered_attenuation(h: WeightFunction, omega: float) -> float:
    """Factor ``exp(-omega^2 tau^2/4) cosh(kbar omega tau^2/2)`` on the filtered mean."""
    if h.kind != "modulated_gauss":
        raise DomainError("attenuation factor needs a modulated_gauss weight")
    return float(np.exp(-(omega**2) * h.tau**2 / 4) * np.cosh(h.kbar * omega * h.tau**2 / 2))


# ---------------------------------------------------------- 4d kernels

def _check_4d(h: WeightFunction):
    if h.kind != "modulated_gauss_4d":
        raise DomainError("needs a modulated_gauss_4d weight")


def _inner_k0(h: WeightFunction, E: float, method: str) -> float:
    """``int dk0 |h0~(k0)|^2 P 1/(k0^2 - E^2)`` with ``|h0~|^2`` the unnormalized
    ``exp(-tau^2 k0^2/2) cosh^2(k0 kbar tau^2/2)``."""
    tau, kbar = h.tau, h.kbar
    if method == "dawson":
        b, pieces = _modulated_sq_pieces(tau, kbar)
        return float(sum(c * _gauss_shift_pv(b, s, E) for s, c in pieces))

    def g0(k):
        return _gauss_cosh(k, tau**2 / 4, kbar * tau**2 / 2) ** 2

    gE = g0(E)
    dgE = (g0(E * (1 + 1e-6)) - g0(E * (1 - 1e-6))) / (2e-6 * E)

    # PV int dk0 / (k0^2 - E^2) = 0 over the real line, so subtracting the
    # constant g0(E) leaves a regular integrand
    def f(k):
        dk = k - E
        if abs(dk) < 1e-7 * E:
            return dgE / (2 * E)
        return (g0(k) - gE) / (dk * (k + E))

    top = max(E, kbar) + 40.0 / tau
    pts = sorted({E, kbar})
    v1, _ = _quad(f, 0.0, top, points=[p for p in pts if 0 < p < top], limit=500,
                           epsabs=1e-13, epsrel=1e-11)
    # tail beyond top: g0 ~ 0, integrand -gE/(k^2 - E^2)
    tail = -gE * np.log((top + E) / (top - E)) / (2 * E)
    return float(2 * (v1 + tail))


def g_hh_scalar_4d(h: WeightFunction, m: float, config: PVQuadratureConfig | None = None,
                   method: str = "quadrature") -> KernelValue:
    """``int d^4k |h~(k)|^2 P 1/(k^2 - m^2)`` for the modulated 4d weight.

    The spatial Gaussian factorizes, leaving a radial integral over ``|k|`` of
    the one-dimensional PV integral over ``k0`` at ``E = sqrt(|k|^2 + m^2)``.
    ``method='dawson'`` evaluates the inner integral in closed form.
    """
    _check_4d(h)
    if m < 0:
        raise DomainError("mass must be non-negative")
    cfg = config or PVQuadratureConfig()
    a = h.a
    pref = 1.0 / (16 * np.pi**4)

    def outer(kap):
        E = np.sqrt(kap**2 + m**2)
        if E == 0:
            return 0.0
        return 4 * np.pi * kap**2 * np.exp(-(a**2) * kap**2 / 2) * _inner_k0(h, E, method)

    top = 12.0 / a
    pts = [p for p in (h.kbar, 1.0 / h.tau) if 0 < p < top]
    v, e = _quad(outer, 0.0, top, points=pts or None, limit=800,
                          epsabs=0.0, epsrel=max(cfg.tolerance, 1e-10))
    return KernelValue(float(pref * v), float(pref * e))


def g_hh_scalar_4d_mc(h: WeightFunction, m: float, n: int = 200_000, seed: int = 0) -> KernelValue:
    """Monte-Carlo estimate of :func:`g_hh_scalar_4d` over the full ``d^4k``.

    Spatial momenta are drawn from the Gaussian matching ``exp(-a^2 |k|^2/2)``;
    ``k0`` from an equal mixture of Cauchy laws of scales ``1/tau + kbar`` and
    ``E``.  The integrand is the pole-subtracted ``(g0(k0) - g0(E))/(k0^2 - E^2)``.
    Returns the mean and its standard error.
    """
    _check_4d(h)
    rng = np.random.default_rng(seed)
    a, tau, kbar = h.a, h.tau, h.kbar
    kv = rng.standard_normal((n, 3)) / a
    kap2 = np.sum(kv**2, axis=1)
    E = np.sqrt(kap2 + m**2)
    s1 = 1.0 / tau + kbar
    pick = rng.random(n) < 0.5
    scale = np.where(pick, s1, E)
    k0 = scale * np.tan(np.pi * (rng.random(n) - 0.5))
    dens = 0.5 * (s1 / (np.pi * (s1**2 + k0**2)) + E / (np.pi * (E**2 + k0**2)))

    def g0(k):
        return _gauss_cosh(k, tau**2 / 4, kbar * tau**2 / 2) ** 2

    num = g0(k0) - g0(E)
    den = k0**2 - E**2
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(np.abs(den) > 0, num / den, 0.0)
    # spatial Gaussian integral normalization: int d^3k exp(-a^2 k^2/2) = (2 pi / a^2)^(3/2)
    w = (2 * np.pi / a**2) ** 1.5 / (16 * np.pi**4)
    samples = w * val / dens
    return KernelValue(float(samples.mean()), float(samples.std(ddof=1) / np.sqrt(n)))


# ---------------------------------------------------- electromagnetic

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def transverse_projector(kvec) -> np.ndarray:
    """``delta_ij - k_i k_j / |k|^2``."""
    kvec = np.asarray(kvec, dtype=float)
    k2 = float(kvec @ kvec)
    if k2 == 0:
        raise SingularityError("transverse projector undefined at |k| = 0")
    return np.eye(3) - np.outer(kvec, kvec) / k2


def em_kernel(k, gauge: str = "coulomb", lam: float = 1.0) -> np.ndarray:
    """Momentum-space photon kernel ``G~^{mu nu}(k)`` (pole prescription P).

    Coulomb: ``G~^{00} = -1/|k|^2`` (instantaneous), ``G~^{0i} = 0``,
    ``G~^{ij} = -(delta_ij - k_i k_j/|k|^2)/k^2``.
    Lorentz family: ``(g^{mu nu} - (1 - lam) k^mu k^nu / k^2) / k^2``.
    The position-space normalization ``(2 pi)^(-4) int d^4k e^{-ikx}`` is left
    to the caller.
    """
    k = np.asarray(k, dtype=float)
    if k.shape != (4,):
        raise DomainError("k must be a four-vector")
    k0, kv = k[0], k[1:]
    ksq = k0**2 - float(kv @ kv)
    if gauge == "coulomb":
        if not np.any(kv):
            raise SingularityError("Coulomb kernel singular at |k| = 0")
        if ksq == 0:
            raise SingularityError("kernel evaluated on the light cone")
        G = np.zeros((4, 4))
        G[0, 0] = -1.0 / float(kv @ kv)
        G[1:, 1:] = -transverse_projector(kv) / ksq
        return G
    if gauge == "lorentz":
        if ksq == 0:
            raise SingularityError("kernel evaluated on the light cone")
        kup = k  # contravariant components
        return (METRIC - (1.0 - lam) * np.outer(kup, kup) / ksq) / ksq
    raise DomainError(f"unknown gauge {gauge!r}")


@dataclass(frozen=True)
class TransverseCurrent:
    """Gaussian-modulated current ``j(x) = e s(x)`` projected transverse.

    ``s`` has the profile of the ``modulated_gauss_4d`` weight; ``j_0 = 0``.
    ``longitudinal`` is the weight of a ``k``-parallel admixture and must be
    zero for a conserved current.
    """

    tau: float
    a: float
    kbar: float
    longitudinal: float = 0.0

    def weight(self) -> WeightFunction:
        return WeightFunction("modulated_gauss_4d", self.tau, self.kbar, self.a)


class Admissibility(NamedTuple):
    value: float            # int d^4k |j~|^2 P 1/k^2 ; admissible when positive
    j_form: float           # int j~*_mu G~^{mu nu} j~_nu, which carries the opposite sign
    admissible: bool
    error_estimate: float


# angular average of 1 - (k.e)^2/|k|^2 for a fixed polarization e
TRANSVERSE_FACTOR = 2.0 / 3.0


def em_admissibility(j: TransverseCurrent, config: PVQuadratureConfig | None = None,
                     method: str = "quadrature") -> Admissibility:
    """Sign of the transverse current's quadratic form against the photon kernel.

    Reduces to ``(2/3)`` times the massless 4d scalar kernel of the same
    profile.  Admissible means timelike momenta dominate (``value > 0``).
    """
    if j.longitudinal != 0:
        raise DomainError("current is not divergence free (longitudinal part present)")
    s = g_hh_scalar_4d(j.weight(), 0.0, config, method=method)
    v = TRANSVERSE_FACTOR * s.value
    return Admissibility(v, -v, bool(v > 0), TRANSVERSE_FACTOR * s.error_estimate)


def _h4_norm_sq(h: WeightFunction) -> float:
    """``int d^4k |h~|^2 = int d^4x h^2`` in closed form."""
    tau, kbar, a = h.tau, h.kbar, h.a
    A2 = np.exp(kbar**2 * tau**2 / 2) / (np.pi * tau**2)
    t_int = 0.5 * tau * np.sqrt(np.pi / 2) * (1 + np.exp(-kbar**2 * tau**2 / 2))
    x_int = (np.pi / 2) ** 1.5 * a**3 / (np.pi**3 * a**6)
    return float(A2 * t_int * x_int)


def em_field_variance_intrinsic(gamma: float, h: WeightFunction, component: str = "E",
                                config: PVQuadratureConfig | None = None,
                                method: str = "quadrature") -> float:
    """Intrinsic variance of one filtered field component.

    ``E_i``: ``(1/2 gamma) int d^4k P (k0^2 - k_i^2)/k^2 |h~|^2``;
    ``B_i``: ``(1/2 gamma) int d^4k P (|k|^2 - k_i^2)/k^2 |h~|^2``.
    For an isotropic weight the angular average of ``k_i^2`` is ``|k|^2/3``,
    so the kernels are ``1 + (2/3)|k|^2/k^2`` and ``(2/3)|k|^2/k^2``.
    """
    _check_4d(h)
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    if component not in ("E", "B"):
        raise DomainError("component must be 'E' or 'B'")
    a = h.a
    pref = 1.0 / (16 * np.pi**4)

    def outer(kap):
        return (4 * np.pi * kap**4 * np.exp(-(a**2) * kap**2 / 2)
                * _inner_k0(h, kap, method)) if kap > 0 else 0.0

    top = 12.0 / a
    cfg = config or PVQuadratureConfig()
    v, _ = _quad(outer, 0.0, top, limit=800, epsabs=0.0,
                          epsrel=max(cfg.tolerance, 1e-10))
    mixed = TRANSVERSE_FACTOR * pref * v
    total = mixed + (_h4_norm_sq(h) if component == "E" else 0.0)
    return float(total / (2 * gamma))


# ---------------------------------------------------------- bound chain

def gamma_lower_bound(E_typ_sq: float, tau: float, a: float) -> float:
    """``0.2 / (E_typ^2 tau a^3)`` (all in cm-based natural units)."""
    for name, v in (("E_typ_sq", E_typ_sq), ("tau", tau), ("a", a)):
        if not v > 0:
            raise DomainError(f"{name} must be positive")
    return 0.2 / (E_typ_sq * tau * a**3)


def stefan_boltzmann_density(T: float) -> tuple[float, float]:
    """Black-body energy density ``(erg cm^-3, cm^-4)``; the second is the first
    divided by ``hbar c``, rounded to the quoted ``2.39e2 T^4``."""
    if T < 0:
        raise DomainError("temperature must be non-negative")
    return STEFAN_BOLTZMANN_ERG * T**4, STEFAN_BOLTZMANN_NATURAL * T**4


class BoundChain(NamedTuple):
    u_erg_cm3: float
    u_natural_computed: float
    u_natural_stated: float
    gamma_bound_computed: float
    gamma_bound_stated: float
    discrepancy: bool


def bound_chain(T: float = 300.0, tau: float = 3e7, a: float = 1e-4) -> BoundChain:
    """Both branches of the cavity estimate.

    The energy density recomputed from the Stefan-Boltzmann coefficient and
    the value ``1.44e18 cm^-4`` usually quoted for 300 K differ by about six
    orders of magnitude; both resulting bounds are returned and the mismatch
    is flagged rather than resolved.
    """
    u_erg, u_nat = stefan_boltzmann_density(T)
    stated = STATED_U300_NATURAL * (T / 300.0) ** 4
    g_c = gamma_lower_bound(u_nat, tau, a)
    g_s = gamma_lower_bound(stated, tau, a)
    return BoundChain(u_erg, u_nat, stated, g_c, g_s, bool(abs(np.log10(stated / u_nat)) > 1))
