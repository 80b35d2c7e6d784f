"""Adaptive RK4 for complex-valued ODE systems along real or complex contours.

Step-halving error control: a full step is compared against two half steps;
the step is accepted when the estimated local error stays below
rel_tol * scale + abs_tol.
"""
from __future__ import annotations

import numpy as np

from .errors import BlowUp, StepSizeUnderflow

REL_TOL = 1e-9
ABS_TOL = 1e-12


def _rk4_step(f, s, y, h):
    k1 = f(s, y)
    k2 = f(s + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(s + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(s + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def solve_rk4(f, s0, s1, y0, rel_tol=REL_TOL, abs_tol=ABS_TOL,
              max_step=None, blowup=None, min_step_factor=1e-12):
    """Integrate dy/ds = f(s, y) from s0 to s1 with adaptive step halving.

    y may be a complex scalar or a complex numpy vector; s is real.
    Returns (s_samples, y_samples) as lists covering every accepted step.

    blowup: optional (threshold, label) — raises BlowUp carrying the
    divergence location when ||y|| exceeds the threshold.
    """
    span = s1 - s0
    if span == 0:
        return [s0], [y0]
    y = np.asarray(y0, dtype=complex)
    scalar = y.ndim == 0
    h = span / 16.0 if max_step is None else np.sign(span) * min(abs(span) / 16.0, max_step)
    min_h = abs(span) * min_step_factor
    s = s0
    ss, ys = [s0], [y.copy()]
    while (s1 - s) * np.sign(span) > 0:
        if abs(h) > abs(s1 - s):
            h = s1 - s
        full = _rk4_step(f, s, y, h)
        half = _rk4_step(f, s + 0.5 * h, _rk4_step(f, s, y, 0.5 * h), 0.5 * h)
        scale = rel_tol * max(np.max(np.abs(y)), np.max(np.abs(half))) + abs_tol
        err = np.max(np.abs(full - half))
        if err <= scale:
            # Accept, with the fifth-order Richardson combination.
            y = half + (half - full) / 15.0
            s = s + h
            ss.append(s)
            ys.append(y.copy())
            if blowup is not None and np.max(np.abs(y)) > blowup[0]:
                raise BlowUp(f"{blowup[1]} diverged at flow parameter {s}", tau_star=s)
            if err < scale / 32.0:
                h *= 2.0
        else:
            h *= 0.5
            if abs(h) < min_h:
                raise StepSizeUnderflow(f"step underflow at s = {s}")
    if scalar:
        return ss, [complex(v) for v in ys]
    return ss, ys
