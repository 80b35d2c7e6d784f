"""Bethe-ansatz machinery: root solving, wavefunction reconstruction,
Bessel-type auxiliary solutions, quasi-momentum, and the scaling flow that
connects to the Gross-Pitaevskii reduction.

Roots x_j satisfy x_j = (1/2) sum_{k!=j} 1/(x_j - x_k)
+ (-1)^N sum_{k!=j} (x_j - x_k)^{2N}; the factor i^{2N} is kept exact.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import specfun as sf
from .errors import (CollisionError, DomainError, NoConvergence, PoleError,
                     SingularFlow)
from .integrate import solve_rk4
from .rgflow import FlowState, Trajectory

_MIN_SEP = 1e-9


@dataclass(frozen=True)
class BetheRoots:
    roots: tuple           # complex x_j
    N: int
    residual: float        # max fixed-point defect

    def __post_init__(self):
        rs = self.roots
        for i in range(len(rs)):
            for j in range(i + 1, len(rs)):
                if abs(rs[i] - rs[j]) <= _MIN_SEP:
                    raise CollisionError("roots are not pairwise distinct")


@dataclass(frozen=True)
class RiccatiParams:
    """Auxiliary-equation parameters: scaling power q, sign zeta, amplitude a."""

    q: float
    zeta: complex
    a: complex

    def __post_init__(self):
        if self.q <= 0:
            raise DomainError("q must be positive")


def _hermite_zeros(n):
    return np.polynomial.hermite.hermroots([0.0] * n + [1.0])


def _defects(x, N):
    n = len(x)
    sign = (-1.0) ** N
    out = np.zeros(n, dtype=complex)
    for j in range(n):
        rhs = 0.0 + 0.0j
        for k in range(n):
            if k == j:
                continue
            d = x[j] - x[k]
            rhs += 0.5 / d + sign * d ** (2 * N)
        out[j] = x[j] - rhs
    return out


def _jacobian(x, N, lam=1.0):
    n = len(x)
    sign = lam * (-1.0) ** N
    J = np.eye(n, dtype=complex)
    for j in range(n):
        for k in range(n):
            if k == j:
                continue
            d = x[j] - x[k]
            dd = -0.5 / (d * d) + sign * 2 * N * d ** (2 * N - 1)
            J[j, j] -= dd
            J[j, k] += dd
    return J


def _check_separation(x):
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(x[i] - x[j]) < _MIN_SEP:
                raise CollisionError("two roots collided during iteration")


def _newton(x, N, lam, tol, max_iter, damping):
    for _ in range(max_iter):
        _check_separation(x)
        F = _defects_weighted(x, N, lam)
        worst = float(np.max(np.abs(F)))
        if worst < tol:
            return x, worst
        try:
            step = np.linalg.solve(_jacobian(x, N, lam), F)
        except np.linalg.LinAlgError:
            step = F  # fixed-point fallback
        x = x - damping * step
    return None, None


def _defects_weighted(x, N, lam):
    n = len(x)
    sign = lam * (-1.0) ** N
    out = np.zeros(n, dtype=complex)
    for j in range(n):
        rhs = 0.0 + 0.0j
        for k in range(n):
            if k == j:
                continue
            d = x[j] - x[k]
            rhs += 0.5 / d + sign * d ** (2 * N)
        out[j] = x[j] - rhs
    return out


def _homotopy(x0, n, N, tol):
    """March the interaction weight 0 -> 0.3+0.4i -> 1; the detour through
    complex weights steers around real-axis folds where root families turn
    complex (the weight-0 system is solved exactly by the scaled Hermite
    zeros)."""
    x = x0 + 1e-3j * np.arange(1, n + 1)
    lam = 0.0 + 0.0j
    for target in (0.3 + 0.4j, 1.0 + 0.0j):
        t, dt = 0.0, 0.25
        start = lam
        while t < 1.0 - 1e-12:
            trial = start + min(1.0, t + dt) * (target - start)
            y, _ = _newton(x.copy(), N, trial, tol, 100, 1.0)
            if y is None:
                dt /= 2
                if dt < 1e-7:
                    raise NoConvergence("homotopy stalled before full interaction")
            else:
                x, lam, t = y, trial, min(1.0, t + dt)
                dt = min(dt * 1.5, 0.25)
    return x


def solve_bethe_roots(n: int, N: int, init=None, tol: float = 1e-12) -> BetheRoots:
    """Damped-Newton solution of the root equations.

    Default initialization: Hermite zeros of degree n scaled by 1/sqrt(2)
    (the exact zero-interaction limit).  When the damped iteration wanders
    (root families beyond n = 2 leave the real axis), a homotopy in the
    interaction weight with a complex detour is used instead.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if n == 1:
        return BetheRoots((0.0 + 0.0j,), N, 0.0)
    if init is None:
        x0 = np.asarray(_hermite_zeros(n) / math.sqrt(2.0), dtype=complex)
    else:
        x0 = np.asarray([complex(v) for v in init], dtype=complex)
        if len(x0) != n:
            raise DomainError("init must supply n starting points")
    x, worst = _newton(x0.copy(), N, 1.0, tol, 200, 0.5)
    if x is None:
        x = _homotopy(x0, n, N, tol)
        worst = float(np.max(np.abs(_defects(x, N))))
    if worst >= tol:
        raise NoConvergence("root iteration exhausted its budget")
    return BetheRoots(tuple(complex(v) for v in x), N, worst)


def symmetric_pair_root(N: int, tol: float = 1e-14) -> float:
    """Positive root of the symmetric-ansatz reduction of the first pair
    equation, x = 1/(4x) + (-1)^N (2x)^{2N}; for N = 1 this is the real root
    of 16 x^3 + 4 x^2 - 1 = 0.

    Note the full two-root system admits no symmetric solution (subtracting
    its two equations forces (x1 - x2)^2 = 1); the reduction applies the
    ansatz to the first equation alone.
    """
    sign = (-1.0) ** N
    x = 0.5
    for _ in range(200):
        f = x - 0.25 / x - sign * (2.0 * x) ** (2 * N)
        if abs(f) < tol:
            return x
        df = 1.0 + 0.25 / (x * x) - sign * 4.0 * N * (2.0 * x) ** (2 * N - 1)
        x -= f / df
    raise NoConvergence("scalar reduction did not converge")


def bethe_wavefunction(x: complex, roots: BetheRoots) -> complex:
    """psi(x) = e^{-x^2/2} prod_j (x - x_j) exp((-1)^N (x-x_j)^{2N+1}/(2N+1))."""
    x = complex(x)
    N = roots.N
    sign = (-1.0) ** N
    val = cmath.exp(-0.5 * x * x)
    for xj in roots.roots:
        d = x - xj
        val *= d * cmath.exp(sign * d ** (2 * N + 1) / (2 * N + 1))
    return val


def _bessel_pair(branch, nu, z):
    if branch == "zeta_pos":
        return sf.bessel("J", nu, z) + sf.bessel("Y", nu, z)
    if branch == "zeta_neg":
        return sf.bessel("I", nu, z) + sf.bessel("K", nu, z)
    raise DomainError(f"unknown branch {branch!r}")


def _bessel_pair_deriv(branch, nu, z):
    # f' = f_{nu-1} - (nu/z) f for J, Y, I; K' = -K_{nu-1} - (nu/z) K
    if branch == "zeta_pos":
        return (sf.bessel("J", nu - 1, z) + sf.bessel("Y", nu - 1, z)
                - (nu / z) * _bessel_pair(branch, nu, z))
    if branch == "zeta_neg":
        return (sf.bessel("I", nu - 1, z) - sf.bessel("K", nu - 1, z)
                - (nu / z) * _bessel_pair(branch, nu, z))
    raise DomainError(f"unknown branch {branch!r}")


def _riccati_argument(x, params, branch):
    root = cmath.sqrt(-params.zeta) if branch == "zeta_pos" else cmath.sqrt(params.zeta)
    return root * sf.cpow(x, params.q) / params.q


def riccati_u(x, params: RiccatiParams, branch: str = "zeta_neg") -> complex:
    """Auxiliary solution u = a sqrt(x) [Z_{1/(2q)}(sqrt(-+zeta) x^q/q) + W_{1/(2q)}(.)].

    zeta_pos pairs J and Y, zeta_neg pairs I and K; both satisfy
    u'' = zeta x^{2q-2} u.
    """
    x = complex(x)
    if x == 0:
        raise DomainError("requires x != 0")
    if params.a == 0:
        return 0.0 + 0.0j
    nu = 1.0 / (2.0 * params.q)
    z = _riccati_argument(x, params, branch)
    return params.a * sf.cpow(x, 0.5) * _bessel_pair(branch, nu, z)


def riccati_u_derivative(x, params: RiccatiParams, branch: str = "zeta_neg") -> complex:
    """du/dx via the chain rule dz/dx = sqrt(-+zeta) x^{q-1} and the
    first-derivative recurrences of the cylinder functions."""
    x = complex(x)
    if x == 0:
        raise DomainError("requires x != 0")
    if params.a == 0:
        return 0.0 + 0.0j
    nu = 1.0 / (2.0 * params.q)
    z = _riccati_argument(x, params, branch)
    root = cmath.sqrt(-params.zeta) if branch == "zeta_pos" else cmath.sqrt(params.zeta)
    f = _bessel_pair(branch, nu, z)
    df = _bessel_pair_deriv(branch, nu, z)
    return params.a * (0.5 * sf.cpow(x, -0.5) * f
                       + sf.cpow(x, 0.5) * df * root * sf.cpow(x, params.q - 1.0))


def quasi_momentum(x: float, roots: BetheRoots, params: RiccatiParams,
                   branch: str = "zeta_neg") -> complex:
    """p = p_x + p_theta with p_x = ix + (1/i) sum_k 1/(x - x_k) and
    p_theta = i sum_j u'(x - x_j) / sum_j u(x - x_j)."""
    x = complex(x)
    num = 0.0 + 0.0j
    den = 0.0 + 0.0j
    px = 1j * x
    for xk in roots.roots:
        d = x - xk
        if abs(d) < 1e-12:
            raise PoleError("quasi-momentum has a pole at every root")
        px += (1.0 / 1j) / d
        num += riccati_u_derivative(d, params, branch)
        den += riccati_u(d, params, branch)
    if den == 0:
        raise PoleError("auxiliary-solution denominator vanished")
    return px + 1j * num / den


def gp_scaling_flow(q2: float, s_contour, chi0: complex, xi0: complex) -> Trajectory:
    """Scaling flow d chi/ds = s chi / (1 - s^{2q-1}) along a complex contour,
    with the documented fallback d chi/ds = s chi at 2q = 1; xi flows as
    xi(s) = xi0 e^s.  Left/right membership of a sample is the sign of Re s.
    """
    pts = [complex(s) for s in s_contour]
    if len(pts) < 2:
        raise DomainError("contour needs at least two points")
    power = q2 - 1.0
    fallback = abs(power) < 1e-14

    def coeff(s):
        if fallback:
            return s
        d = 1.0 - sf.cpow(s, power) if s != 0 else 1.0 + 0.0j
        if abs(d) < 1e-6:
            raise SingularFlow(f"contour too close to the singular locus at s = {s}")
        return s / d

    chi = complex(chi0)
    states = [FlowState(pts[0], chi, complex(xi0) * cmath.exp(pts[0]))]
    for sa, sb in zip(pts, pts[1:]):
        ds = sb - sa

        def f(t, y, sa=sa, ds=ds):
            s = sa + t * ds
            return np.asarray(coeff(s) * y * ds, dtype=complex)

        _, ys = solve_rk4(f, 0.0, 1.0, chi)
        chi = complex(ys[-1])
        states.append(FlowState(sb, chi, complex(xi0) * cmath.exp(sb)))
    angle = cmath.phase(pts[-1] - pts[0]) if pts[-1] != pts[0] else 0.0
    return Trajectory(tuple(states), angle, abs(pts[1] - pts[0]))
