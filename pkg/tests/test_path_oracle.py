import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from beable.discrete_kernel import GridSpec
from beable.errors import DomainError, NumericError, SingularityError
from beable.path_oracle import (
    GaussianEndpointState, GaussianMixture, WorldLine, brownian_bridge_family,
    cfo_bruteforce, cfo_discrete, classical_solution, density_diagonal_factorized,
    density_factor, density_factor_batch, feynman_discrete, feynman_exact, feynman_free,
    gaussian_integral, interpolant_fourier, lowfreq_residual, lowfreq_scan, prime_sum,
    white_noise_family,
)

G3 = GridSpec.from_T(3, 1.0, 1.0)
STATE = GaussianEndpointState(0.4, 0.3, 0.7)


# ------------------------------------------------------------ Feynman

def test_free_limit():
    ex = feynman_exact(0.3, 0.7, 1.0, 1e-6).value
    free = feynman_free(0.3, 0.7, 1.0)
    assert abs(ex - free) / abs(free) < 1e-10


def test_origin_value():
    ex = feynman_exact(0.0, 0.0, 1.0, 1.0).value
    assert ex == pytest.approx(np.sqrt(1 / (2j * np.pi * np.sin(1.0))), rel=1e-14)


def test_closed_form_textbook_phase():
    # direct transcription of the textbook phase, away from small omega
    Q0, Q, tau, w = 0.2, -0.9, 0.8, 1.7
    s, c = np.sin(w * tau), np.cos(w * tau)
    ref = np.sqrt(w / (2j * np.pi * s)) * np.exp(1j * w * ((Q**2 + Q0**2) * c - 2 * Q * Q0) / (2 * s))
    assert feynman_exact(Q0, Q, tau, w).value == pytest.approx(ref, rel=1e-13)


def test_caustic_raises():
    with pytest.raises(SingularityError):
        feynman_exact(0.0, 1.0, np.pi, 1.0)
    assert feynman_exact(0.0, 1.0, 4.0, 1.0).prefactor_branch == 1


@pytest.mark.parametrize("mass", [0, -1j, 0j])
def test_mass_validation(mass):
    with pytest.raises(DomainError):
        feynman_exact(0, 1, 1, 1, mass)


def test_single_slice_is_short_time_kernel():
    Q0, QF, eps, w = 0.3, -0.4, 0.05, 1.2
    g = GridSpec(N=1, eps=eps, omega=w, T=eps)
    ref = np.sqrt(1 / (2j * np.pi * eps)) * np.exp(1j * (QF - Q0) ** 2 / (2 * eps) - 0.5j * eps * w**2 * Q0**2)
    assert feynman_discrete(Q0, QF, g).value == pytest.approx(ref, rel=1e-14)


def test_first_order_convergence_real_mass():
    ex = feynman_exact(0, 1, 1, 1).value
    errs = [abs(feynman_discrete(0, 1, GridSpec.from_T(N, 1, 1)).value - ex) / abs(ex)
            for N in (32, 64, 128)]
    assert errs[1] <= 0.01
    assert errs[0] / errs[1] == pytest.approx(2, rel=0.02)
    assert errs[1] / errs[2] == pytest.approx(2, rel=0.02)
    assert errs == pytest.approx([7.7446237e-3, 3.8892748e-3, 1.9488805e-3], rel=1e-6)


def test_imaginary_mass_agreement():
    ex = feynman_exact(0, 1, 1, 1, 1j).value
    v = feynman_discrete(0, 1, GridSpec.from_T(256, 1, 1), 1j).value
    assert abs(v - ex) / abs(ex) < 1e-3


@settings(max_examples=20, deadline=None)
@given(w=st.floats(0.2, 2.0), tau=st.floats(0.3, 2.5))
def test_convergence_property(w, tau):
    # before the first caustic the principal root is the composed branch
    if w * tau > np.pi - 0.3:
        return
    ex = feynman_exact(0.1, 0.6, tau, w).value
    e1 = abs(feynman_discrete(0.1, 0.6, GridSpec.from_T(200, tau, w)).value - ex)
    e2 = abs(feynman_discrete(0.1, 0.6, GridSpec.from_T(400, tau, w)).value - ex)
    assert 1.7 < e1 / e2 < 2.3


@pytest.mark.parametrize("wt", [4.0, 5.0, 7.0, 8.0])
def test_beyond_caustics_up_to_sign(wt):
    ex = feynman_exact(0.1, 0.6, wt, 1.0)
    d = feynman_discrete(0.1, 0.6, GridSpec.from_T(2000, wt, 1.0))
    assert d.prefactor_branch == ex.prefactor_branch == int(wt // np.pi)
    r = d.value / ex.value
    assert abs(abs(r) - 1) < 1e-3
    assert min(abs(r - 1), abs(r + 1)) < 1e-3


# ----------------------------------------------------- Gaussian algebra

def test_gaussian_integral_real_closed_form(rng):
    A = rng.standard_normal((4, 4))
    M = A @ A.T + 4 * np.eye(4)
    b = rng.standard_normal(4)
    ref = (2 * np.pi) ** 2 / np.sqrt(np.linalg.det(M)) * np.exp(0.5 * b @ np.linalg.solve(M, b))
    assert gaussian_integral(M, b) == pytest.approx(ref, rel=1e-12)


def test_gaussian_integral_complex_1d():
    M, b = 1.3 - 2.0j, 0.4 + 0.7j
    re = integrate.quad(lambda x: np.exp(-M * x * x / 2 + b * x).real, -np.inf, np.inf)[0]
    im = integrate.quad(lambda x: np.exp(-M * x * x / 2 + b * x).imag, -np.inf, np.inf)[0]
    assert gaussian_integral([[M]], [b]) == pytest.approx(re + 1j * im, rel=1e-9)


def test_gaussian_integral_rejects_growth():
    with pytest.raises(NumericError):
        gaussian_integral([[-1.0]], [0.0])


def test_prime_sum_is_half_quadratic_form(rng):
    A = rng.standard_normal((5, 5))
    G = A + A.T
    xi = rng.standard_normal(5)
    literal = sum((0.5 if i == j else 1.0) * G[i, j] * xi[i] * xi[j] for i in range(5) for j in range(i + 1))
    assert prime_sum(G, xi) == pytest.approx(literal)
    assert prime_sum(G, xi) == pytest.approx(0.5 * xi @ G @ xi)


# -------------------------------------------------------------- CFO

def test_cfo_trace_normalization():
    Q = np.linspace(-12, 12, 801)
    p = np.array([cfo_discrete(STATE, None, G3, 0.5, x, x) for x in Q])
    assert abs(np.trapezoid(p.real, Q) - 1) < 1e-6
    assert np.max(np.abs(p.imag)) < 1e-12


def test_cfo_hermitian_symmetry(rng):
    for _ in range(5):
        xi = rng.standard_normal(3)
        QF, QFp = rng.standard_normal(2)
        a = cfo_discrete(STATE, xi, G3, 0.5, QF, QFp)
        b = cfo_discrete(STATE, -xi, G3, 0.5, QFp, QF)
        assert abs(a - np.conj(b)) < 1e-10


def test_cfo_linear_in_state(rng):
    s2 = GaussianEndpointState(-0.5, 1.1, 0.4)
    mix = GaussianMixture((STATE, s2), (0.3, 0.7))
    xi = rng.standard_normal(3)
    lhs = cfo_discrete(mix, xi, G3, 0.5, 0.1, 0.2)
    rhs = 0.3 * cfo_discrete(STATE, xi, G3, 0.5, 0.1, 0.2) + 0.7 * cfo_discrete(s2, xi, G3, 0.5, 0.1, 0.2)
    assert abs(lhs - rhs) < 1e-10


def test_cfo_rejects():
    with pytest.raises(DomainError):
        cfo_discrete(STATE, None, G3, 0.0, 0, 0)
    with pytest.raises(DomainError):
        cfo_discrete(STATE, np.ones(2), G3, 0.5, 0, 0)
    with pytest.raises(DomainError):
        GaussianEndpointState(0, 0, 0)


def test_bruteforce_coarse_grid():
    xi = np.array([0.3, -0.8, 0.5])
    cf = cfo_discrete(STATE, xi, G3, 0.5, 0.2, -0.4, mass=1j)
    bf = cfo_bruteforce(STATE, xi, G3, 0.5, 0.2, -0.4, mass=1j, points=9, span=5.0)
    assert abs(bf.value - cf) / abs(cf) < 1e-3


def test_bruteforce_rejects_real_mass():
    with pytest.raises(NumericError):
        cfo_bruteforce(STATE, None, G3, 0.5, 0.2, -0.4, mass=1.0, points=3)


# ---------------------------------------------------------- densities

def _line(rng, QF, QFp, grid=G3):
    return WorldLine(np.r_[rng.normal(size=grid.N), 0.5 * (QF + QFp)], grid)


def test_density_diagonal_positive(rng):
    for _ in range(100):
        QF = rng.normal()
        q = _line(rng, QF, QF)
        v = density_factor(STATE, q, 0.5, QF, QF)
        assert abs(v.imag) < 1e-12 * max(1, abs(v.real))
        assert v.real >= 0


def test_density_matches_factorized(rng):
    for _ in range(10):
        QF = rng.normal()
        q = _line(rng, QF, QF)
        a = density_factor(STATE, q, 0.5, QF, QF).real
        b = density_diagonal_factorized(STATE, q, 0.5, QF)
        assert a == pytest.approx(b, rel=1e-10)


def test_density_boundary_condition(rng):
    q = WorldLine(np.r_[rng.normal(size=3), 9.0], G3)
    with pytest.raises(DomainError, match="boundary"):
        density_factor(STATE, q, 0.5, 0.2, 0.2)


@pytest.fixture(scope="module")
def density_grid():
    QF, QFp = 0.2, -0.4
    x = np.linspace(-9, 9, 49)
    h = x[1] - x[0]
    Qg = np.stack(np.meshgrid(x, x, x, indexing="ij"), -1).reshape(-1, 3)
    f = density_factor_batch(STATE, Qg, G3, 0.5, QF, QFp)
    Dc = (G3.eps / (2 * np.pi)) ** 1.5 * h**3
    return Qg, f, Dc, QF, QFp


def test_density_integrates_to_cfo(density_grid):
    Qg, f, Dc, QF, QFp = density_grid
    ref = cfo_discrete(STATE, None, G3, 0.5, QF, QFp)
    assert abs(np.sum(f) * Dc - ref) / abs(ref) < 1e-4


def test_density_fourier_pairing(density_grid):
    Qg, f, Dc, QF, QFp = density_grid
    xi = np.array([0.3, -0.8, 0.5])
    ft = np.sum(f * np.exp(-1j * G3.eps * Qg @ xi)) * Dc
    ref = cfo_discrete(STATE, xi, G3, 0.5, QF, QFp)
    assert abs(ft - ref) / abs(ref) < 1e-3


def test_batch_matches_single(rng):
    q = _line(rng, 0.2, -0.4)
    single = density_factor(STATE, q, 0.5, 0.2, -0.4)
    batch = density_factor_batch(STATE, q.values[None, :3], G3, 0.5, 0.2, -0.4)[0]
    assert single == batch


# --------------------------------------------------------- interpolant

def test_interpolant_constant_line():
    g = GridSpec.from_T(16, 2.0, 1.0)
    line = WorldLine(np.full(17, 1.7), g)
    assert interpolant_fourier(line, 0.0) == pytest.approx(1.7 * np.sqrt(2.0), rel=1e-14)
    for n in (1, 2, 5):
        assert abs(interpolant_fourier(line, 2 * np.pi * n / 2.0)) < 1e-12


@pytest.mark.parametrize("k", [0.0, 0.37, -2.1, 9.0, 50.0])
def test_interpolant_vs_quadrature(rng, k):
    g = GridSpec.from_T(12, 1.5, 1.0)
    line = WorldLine(rng.standard_normal(13), g)
    t = line.times

    def part(fn):
        return sum(integrate.quad(lambda s: fn(np.exp(-1j * k * s) * np.interp(s, t, line.values)),
                                  t[j], t[j + 1], epsabs=1e-14, epsrel=1e-13)[0] for j in range(12))

    ref = (part(np.real) + 1j * part(np.imag)) / np.sqrt(g.T)
    assert abs(interpolant_fourier(line, k) - ref) < 1e-10


def test_interpolant_tiny_k_continuous(rng):
    g = GridSpec.from_T(10, 1.0, 1.0)
    line = WorldLine(rng.standard_normal(11), g)
    assert interpolant_fourier(line, 1e-9) == pytest.approx(interpolant_fourier(line, 0.0), abs=1e-8)


def test_increment_term_suppressed_at_low_k():
    fam = brownian_bridge_family(1.0, 1.0)
    ratios = []
    for N in (64, 256, 1024):
        line = fam(N, np.random.default_rng(3))
        first, second = interpolant_fourier(line, 0.5, split=True)
        ratios.append(abs(second) / abs(first))
    assert ratios[0] < 1e-3
    assert ratios[0] > ratios[1] > ratios[2]


def test_classical_residual_zero():
    g = GridSpec.from_T(100, 1.0, 1.0)
    line = WorldLine(classical_solution(g, 0.3, -0.2), g)
    assert lowfreq_residual(line) < 1e-10


def test_classical_solution_singular():
    with pytest.raises(SingularityError):
        classical_solution(GridSpec.from_T(10, np.pi, 1.0), 0, 1)


def test_white_noise_lines_decay():
    scan = lowfreq_scan(white_noise_family(1.0, 1.0), 1.0, seeds=50, seed=0)
    assert np.all(np.diff(scan.residual) < 0)
    assert scan.slope <= -0.5


def test_brownian_bridge_content_persists():
    # a Brownian bridge has O(1) low-frequency content in the continuum limit
    scan = lowfreq_scan(brownian_bridge_family(1.0, 1.0), 1.0, seeds=50, seed=0)
    assert abs(scan.slope) < 0.2
    assert np.all(scan.residual > 0.1)


def test_lowfreq_scan_needs_two_sizes():
    with pytest.raises(DomainError):
        lowfreq_scan(white_noise_family(1.0, 1.0), 1.0, Ns=(64, 64), seeds=2)
