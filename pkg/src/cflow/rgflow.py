"""Renormalization-group flow engines for the complex-coupled oscillator.

Covers the discrete step recursion in Matsubara time, one-loop ODE flows and
their conserved combinations, the N-power and left-right flows with their
closed-form beta scales, saddle points of the log-action, regulator-integral
ground-state energies, effective-potential contour formulas, the
continued-fraction propagator recursion, and third-order corrections.

Flow contours are polylines in the complex tau plane; straight-ray contours
tau(s) = s e^{i alpha} are built with `ray_contour`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import specfun as sf
from .errors import (BlowUp, BranchCollision, BranchCut, DivisionByZero,
                     DomainError, ExceptionalPoint, NoConvergence, RangeError)
from .integrate import solve_rk4


@dataclass(frozen=True)
class FlowState:
    """One point of a coupling flow: parameter tau, inverse propagator, coupling."""

    tau: complex
    g_inv: complex
    gamma: complex

    def __post_init__(self):
        for v in (self.tau, self.g_inv, self.gamma):
            if not (math.isfinite(complex(v).real) and math.isfinite(complex(v).imag)):
                raise DomainError("flow state fields must be finite")


@dataclass(frozen=True)
class Trajectory:
    states: tuple          # ordered FlowState samples
    contour_angle: float   # radians, direction of the tau contour
    step: float            # representative |d tau| between samples

    def __post_init__(self):
        if len(self.states) == 0:
            raise DomainError("trajectory must contain at least one state")


@dataclass(frozen=True)
class WetterichParams:
    """Regulator-integral parameters: frequency, couplings, UV cutoff, power."""

    omega: float
    Lambda: float
    gamma: float = 0.0
    delta: float = 0.0
    N: int = 1

    def __post_init__(self):
        if self.omega <= 0 or self.Lambda <= 0:
            raise DomainError("omega and Lambda must be positive")
        if self.gamma < 0 or self.delta < 0:
            raise DomainError("gamma and delta must be non-negative")
        if self.N < 1:
            raise DomainError("N must be a positive integer")


def ray_contour(angle: float, s_max: float, n_points: int):
    """Straight contour tau(s) = s e^{i angle}, s on [0, s_max]."""
    e = cmath.exp(1j * angle)
    return [s_max * k / (n_points - 1) * e for k in range(n_points)]


def _integrate_contour(rhs, y0, contour, blowup=None):
    """RK4 along a polyline of complex tau nodes; samples at the nodes."""
    taus = [complex(t) for t in contour]
    if len(taus) < 2:
        raise DomainError("contour needs at least two points")
    y = np.asarray(y0, dtype=complex)
    out = [y.copy()]
    for ta, tb in zip(taus, taus[1:]):
        dtau = tb - ta

        def f(s, v, ta=ta, dtau=dtau):
            return rhs(ta + s * dtau, v) * dtau

        try:
            _, ys = solve_rk4(f, 0.0, 1.0, y, blowup=blowup, min_step_factor=1e-16)
        except BlowUp as exc:
            raise BlowUp(str(exc), tau_star=ta + exc.tau_star * dtau) from None
        y = ys[-1]
        out.append(np.asarray(y, dtype=complex).copy())
    return taus, out


def _trajectory_from_samples(taus, samples):
    states = tuple(FlowState(t, complex(v[0]), complex(v[1]))
                   for t, v in zip(taus, samples))
    angle = cmath.phase(taus[-1] - taus[0]) if taus[-1] != taus[0] else 0.0
    return Trajectory(states, angle, abs(taus[1] - taus[0]))


# ---------------------------------------------------------------------------
# discrete step recursion
# ---------------------------------------------------------------------------

def continuity_root(g_prev: complex, gamma_n: complex) -> complex:
    """Root of g^2 - g_prev g + gamma^2 = 0 closest to g_prev."""
    disc = g_prev * g_prev - 4.0 * gamma_n * gamma_n
    if abs(disc) <= 1e-14 * max(abs(g_prev) ** 2, abs(gamma_n) ** 2, 1e-300):
        raise BranchCollision("quadratic discriminant vanished (exceptional point)")
    r = cmath.sqrt(disc)
    cand = (0.5 * (g_prev + r), 0.5 * (g_prev - r))
    return min(cand, key=lambda g: abs(g - g_prev))


def tau_step_recursion(prev: FlowState, step: float = 1.0,
                       tol: float = 1e-13, max_iter: int = 500) -> FlowState:
    """One implicit step of the coupled recursion.

    g_n = g_{n-1} - gamma_n^2/g_n is solved as a quadratic with the branch
    chosen by continuity; gamma_n = gamma_{n-1} + gamma_n^2 gamma_{n-1}/g_n is
    closed by a damped fixed point seeded at gamma_{n-1}.
    """
    if prev.g_inv == 0:
        raise DomainError("step requires a nonzero inverse propagator")
    g_prev, gam_prev = complex(prev.g_inv), complex(prev.gamma)
    if gam_prev == 0:
        return FlowState(prev.tau + step, g_prev, 0.0)
    gam = gam_prev
    g = g_prev
    for _ in range(max_iter):
        g = continuity_root(g_prev, gam)
        gam_next = gam_prev + gam * gam * gam_prev / g
        if abs(gam_next - gam) <= tol * max(abs(gam_next), 1e-300):
            return FlowState(prev.tau + step, continuity_root(g_prev, gam_next), gam_next)
        gam = gam + 0.5 * (gam_next - gam)
    raise NoConvergence("coupling fixed point did not converge")


# ---------------------------------------------------------------------------
# one-loop invariant flows
# ---------------------------------------------------------------------------

def one_loop_invariant_flow(variant: str, gamma_grid, C: float,
                            complex_mode: bool = False):
    """One-loop flow as a function of the running coupling gamma.

    separated_v1 integrates dt/dgamma = -3 t^{3/2} gamma^{-1/2} for
    t = gamma^3/g_inv^2 (so (2/3) g_inv = 2 gamma^2 + C gamma^{3/2} is
    conserved) and reports g_inv = gamma^{3/2}/sqrt(t); appendix_v2 evaluates
    the level set g_inv = gamma sqrt(log(1/gamma) + C) directly.

    Returns (trajectory, invariants) with one invariant value per sample.
    """
    gammas = [float(g) for g in gamma_grid]
    if any(g <= 0 for g in gammas) or any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise DomainError("gamma_grid must be positive and increasing")
    states, invariants = [], []
    if variant == "separated_v1":
        root = 1.5 * (C + 2.0 * math.sqrt(gammas[0]))
        if root <= 0:
            raise DomainError("no real t matches this invariant at the first gamma")
        t = root ** -2.0

        def f(g, y):
            return np.asarray(-3.0 * y ** 1.5 / math.sqrt(g), dtype=complex)

        for i, g in enumerate(gammas):
            if i > 0:
                _, ys = solve_rk4(f, gammas[i - 1], g, complex(t))
                t = ys[-1].real
            g_inv = g ** 1.5 / math.sqrt(t)
            states.append(FlowState(g, g_inv, g))
            invariants.append((2.0 / 3.0) * t ** -0.5 - 2.0 * math.sqrt(g))
    elif variant == "appendix_v2":
        for g in gammas:
            arg = math.log(1.0 / g) + C
            if arg < 0 and not complex_mode:
                raise DomainError("negative level-set argument; pass complex_mode=True")
            g_inv = g * cmath.sqrt(arg)
            states.append(FlowState(g, g_inv, g))
            invariants.append((g_inv / g) ** 2 - math.log(1.0 / g))
    else:
        raise DomainError(f"unknown variant {variant!r}")
    traj = Trajectory(tuple(states), 0.0, gammas[1] - gammas[0] if len(gammas) > 1 else 0.0)
    return traj, invariants


# ---------------------------------------------------------------------------
# N-power and left-right flows
# ---------------------------------------------------------------------------

BLOWUP_G = 1e12


def n_power_flow(init: FlowState, N: int, contour) -> Trajectory:
    """Flow dg/dtau = g^2 - N^2 gamma^{2N}, dgamma/dtau = gamma g."""
    if N < 1:
        raise DomainError("N must be a positive integer")

    def rhs(tau, y):
        g, gam = y
        return np.array([g * g - N * N * gam ** (2 * N), gam * g], dtype=complex)

    taus, samples = _integrate_contour(rhs, [init.g_inv, init.gamma], contour,
                                       blowup=(BLOWUP_G, "inverse propagator"))
    return _trajectory_from_samples(taus, samples)


def lr_flow(init: FlowState, N: int, nu: float, contour) -> Trajectory:
    """Left-right basis flow with the angular weight sin(nu/N).

    dg/dtau = g^2 - N^2 gamma^{2N} sin^{2N}(nu/N);
    dgamma/dtau = (-1)^N gamma sin^2(nu/N) g / N.
    """
    if N < 1:
        raise DomainError("N must be a positive integer")
    s = math.sin(nu / N)
    sign = (-1.0) ** N

    def rhs(tau, y):
        g, gam = y
        dg = g * g - N * N * gam ** (2 * N) * s ** (2 * N)
        dgam = sign * gam * s * s * g / N
        return np.array([dg, dgam], dtype=complex)

    taus, samples = _integrate_contour(rhs, [init.g_inv, init.gamma], contour,
                                       blowup=(BLOWUP_G, "inverse propagator"))
    return _trajectory_from_samples(taus, samples)


def lr_beta_closed_form(g_inv: complex, k: complex, N: int, nu: float,
                        form: str = "advanced"):
    """Closed-form beta scale of the left-right flow.

    advanced: beta = -g^{2N+1} 2F1(1,(2N+1)/(2N+2);(4N+3)/(2N+2);-g^{2N+2}/k)
    / ((2N+1) k), paired with gamma_tilde; retarded: beta = G 2F1(1, 1/(2N);
    1+1/(2N); k G^{2N}) with G = 1/g_inv.
    """
    if N < 1:
        raise DomainError("N must be a positive integer")
    g = complex(g_inv)
    k = complex(k)
    if form == "advanced":
        if g == 0:
            return 0.0 + 0.0j, 0.0 + 0.0j
        z = -g ** (2 * N + 2) / k
        f = sf.hyp2f1(1.0, (2.0 * N + 1) / (2.0 * N + 2), (4.0 * N + 3) / (2.0 * N + 2), z)
        beta = -g ** (2 * N + 1) * f / (2.0 * k * N + k)
        return beta, gamma_tilde(beta, k, N, nu)
    if form == "retarded":
        if g == 0:
            raise DomainError("retarded form requires g_inv != 0")
        G = 1.0 / g
        beta = G * sf.hyp2f1(1.0, 1.0 / (2.0 * N), 1.0 + 1.0 / (2.0 * N), k * G ** (2 * N))
        return beta, gamma_tilde(beta, k, N, nu)
    raise DomainError(f"unknown form {form!r}")


def gamma_tilde(beta: complex, k: complex, N, nu: float) -> complex:
    """Renormalized coupling scale beta k^{1/(2N)} N^{-(2N+2)/(2N)} / sqrt(sin(nu/N))."""
    s = math.sin(nu / N)
    if s <= 0:
        raise DomainError("requires sin(nu/N) > 0")
    return (complex(beta) * sf.cpow(k, 1.0 / (2.0 * N))
            * N ** (-(2.0 * N + 2) / (2.0 * N)) / math.sqrt(s))


# ---------------------------------------------------------------------------
# log-action and its saddle points
# ---------------------------------------------------------------------------

_ARC_NODES = np.polynomial.legendre.leggauss(240)


def _series_tail(w: complex, b: float) -> complex:
    """sum_{m>=1} w^m/(m+b) = w/(1+b) 2F1(1, 1+b; 2+b; w), principal branch."""
    return w / (1.0 + b) * sf.hyp2f1(1.0, 1.0 + b, 2.0 + b, w)


def _series_tail_arc(w: complex, b: float) -> complex:
    """Same function continued analytically across the cut [1, inf).

    Integral representation w * int_0^1 t^b/(1 - w t) dt with the t-contour
    bowed into the upper half plane, so the value is analytic in a full strip
    around the real w axis for Re w > 1 (it agrees with the principal branch
    for Im w > 0).  Endpoint substitution s = sigma^2 absorbs the t^b
    singularity for b > -1.
    """
    nodes, weights = _ARC_NODES
    sig = 0.5 * (nodes + 1.0)
    wts = 0.5 * weights
    s = sig * sig
    t = s + 0.5j * s * (1.0 - s)
    dt_ds = 1.0 + 0.5j * (1.0 - 2.0 * s)
    integrand = np.exp(b * np.log(t, where=(t != 0), out=np.zeros_like(t))) \
        / (1.0 - w * t) * dt_ds * 2.0 * sig
    integrand[sig == 0] = 0.0
    return w * complex(np.sum(wts * integrand))


def _tail(w: complex, b: float) -> complex:
    if b == -1.0:
        # power m = 1 carries a divergent 1/(b+1) weight; the remaining series
        # sums to -w log(1 - w).
        return -w * sf.clog(1.0 - w)
    if w.real > 0.9 and abs(w.imag) < 0.6:
        return _series_tail_arc(w, b)
    return _series_tail(w, b)


def log_action(g_inv: complex, gamma: float, N: int, nu: complex) -> complex:
    """ln(S_eff/S_0) = u (N - T(w)) with u = sin(nu/N), w = c u^{2-N},
    c = -g_inv N e^{i N pi/2} / gamma^N, T(w) = sum_{m>=1} w^m/(m + 1/(2-N))."""
    if N == 2:
        raise DomainError("log-action family is degenerate at N = 2")
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    u = cmath.sin(complex(nu) / N)
    c = -complex(g_inv) * N * (1j ** N) / gamma ** N
    if u == 0:
        return 0.0 + 0.0j
    w = c * u ** (2 - N)
    return u * (N - _tail(w, 1.0 / (2.0 - N)))


def saddle_points(g_inv: complex, gamma: float, N: int, n_range):
    """Stationary points nu_n = N [n pi + (-1)^n arcsin(u*)] of the log-action.

    The stationary condition fixes w* = c u*^{2-N}: w* = N/2 for the full
    series tail, and the root of w^2 - N w + N = 0 for the regularized tail
    at N = 3 (where the m = 1 series weight is divergent and dropped).
    """
    if N == 2:
        raise DomainError("saddle family is degenerate at N = 2")
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if g_inv == 0:
        u_star = 0.0 + 0.0j
    else:
        c = -complex(g_inv) * N * (1j ** N) / gamma ** N
        if N == 3:
            w_star = 0.5 * (3.0 + 1j * math.sqrt(3.0))
        else:
            w_star = complex(N / 2.0)
        u_star = sf.cpow(w_star / c, 1.0 / (2.0 - N))
    if abs(u_star.imag) < 1e-14 and abs(u_star.real) > 1.0:
        raise BranchCut("arcsin argument on the real cut")
    asin_u = cmath.asin(u_star)
    return [N * (n * math.pi + (-1) ** n * asin_u) for n in n_range]


# ---------------------------------------------------------------------------
# regulator-integral ground-state energies and effective potentials
# ---------------------------------------------------------------------------

def wetterich_ground_energy(params: WetterichParams, mode: str) -> complex:
    """Ground-state energy from the regulator integral at cutoff Lambda."""
    w, L = params.omega, params.Lambda
    if mode == "real_osc":
        return (w / math.pi) * math.atan(L / w)
    if mode == "perturbed":
        d = params.delta
        if d >= w:
            raise DomainError("perturbed mode requires delta < omega")
        s = math.sqrt(1.0 - (d / w) ** 2)
        return (w / math.pi) * s * math.atan(L / (w * s))
    if mode == "complex_osc":
        g = params.gamma
        r = cmath.sqrt(w * w - g * g + 1j * g * w)
        return r * cmath.atan(L / r)
    raise DomainError(f"unknown mode {mode!r}")


def u_eff(params: WetterichParams, mode: str) -> complex:
    """Effective-potential contour integrals, evaluated in closed form.

    The phase factors e^{i pi/2} and e^{i pi} that encode the rotated contour
    are kept exact (i and -1).
    """
    w, g, L, N = params.omega, params.gamma, params.Lambda, params.N
    if mode == "n1":
        root = cmath.sqrt(4.0 * w * w + g * g)
        term1 = 0.5j * g * sf.clog(1j * g * L + L * L + w * w)
        term2 = (-2.0 * w * w - g * g) * cmath.atan((2.0 * L + 1j * g) / root) / root
        return term1 - term2
    if mode == "n2":
        a = 1.0 - g + 0.0j
        if a == 0:
            raise DomainError("n2 mode degenerate at gamma = 1")
        return (w * cmath.atan(L * cmath.sqrt(a) / w) / sf.cpow(a, 1.5)
                - g * L / a)
    if mode == "omega0_split":
        phi = (2.0 * N - 1.0) * math.pi / 2.0
        zm = -cmath.exp(-1j * phi) * L ** (2 * N)
        zp = -cmath.exp(1j * phi) * L ** (2 * N)
        b = 1.0 / (2.0 * N)
        return L * (sf.hyp2f1(1.0, b, 1.0 + b, zm) - sf.hyp2f1(1.0, b, 1.0 + b, zp))
    if mode == "n_infinity":
        s = 1.0 + (-1.0) ** N * L ** (2 * N)
        return 1j * (s * s / 2.0 - 0.5)
    raise DomainError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# continued-fraction propagator recursion
# ---------------------------------------------------------------------------

def regulator_matrix_entry(tau_i: float, tau_j: float) -> float:
    """Gaussian vertex R_{i,j} = e^{-(tau_i^2 + tau_j^2)/2}."""
    return math.exp(-0.5 * (tau_i * tau_i + tau_j * tau_j))


def continued_fraction_rg(g0, tau_grid, depth: int):
    """Two-level Jacobi continued-fraction correction, iterated `depth` times.

    Each level replaces g_n by (g_n + R_nn) - R^2/(g_{n+1} + R_{n+1,n+1})
    - R^2/[that same bracket], with the Gaussian vertex R and periodic site
    index; between levels the working couplings shift n -> n+1.  depth = 0
    returns the bare g_n + R_nn.
    """
    if depth < 0:
        raise DomainError("depth must be non-negative")
    g = [complex(v) for v in g0]
    taus = [float(t) for t in tau_grid]
    if len(g) != len(taus):
        raise DomainError("g0 and tau_grid must have the same length")
    L = len(g)
    if depth == 0:
        return [g[n] + regulator_matrix_entry(taus[n], taus[n]) for n in range(L)]
    work = g
    tilde = None
    for d in range(depth):
        tilde = []
        for n in range(L):
            m = (n + 1) % L
            r_diag_n = regulator_matrix_entry(taus[n], taus[n])
            r_diag_m = regulator_matrix_entry(taus[m], taus[m])
            r_off = regulator_matrix_entry(taus[n], taus[m])
            head = work[n] + r_diag_n
            den1 = work[m] + r_diag_m
            if den1 == 0:
                raise DivisionByZero("inner denominator vanished", site=n, depth=d)
            inner = head - r_off * r_off / den1
            if inner == 0:
                raise DivisionByZero("outer denominator vanished", site=n, depth=d)
            tilde.append(inner - r_off * r_off / inner)
        work = [tilde[(n + 1) % L] for n in range(L)]
    return tilde


# ---------------------------------------------------------------------------
# third-order corrections and normal-ordering weights
# ---------------------------------------------------------------------------

def third_order_corrections(g_inv: complex, gamma: complex):
    """Third-order vertex corrections; their ratio equals g_inv/gamma."""
    g = complex(g_inv)
    gam = complex(gamma)
    den = g - gam * gam
    if den == 0:
        raise ExceptionalPoint("third-order corrections degenerate at g_inv = gamma^2")
    dg = -(gam * gam * g - g * g - g * g * g) / den
    dgam = -(-gam * g + gam ** 3 - gam * g * g) / den
    return dg, dgam


def normal_order_coeff(n: int, m: int, l: int) -> Fraction:
    """Normal-ordering weight n! / (2^l l! (n-l)! (n-m-l)!), exact."""
    if not (0 <= m <= n):
        raise RangeError("requires 0 <= m <= n")
    if not (0 <= l <= min(m, n - m)):
        raise RangeError("requires 0 <= l <= min(m, n-m)")
    return Fraction(math.factorial(n),
                    2 ** l * math.factorial(l) * math.factorial(n - l)
                    * math.factorial(n - m - l))
