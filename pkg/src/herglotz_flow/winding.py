"""Continuous arguments along flow trajectories and spectral-shift densities.

For a flow generated by X with gamma != 0, w(t) = c_t m + d_t never vanishes
when Im m > 0.  Its continuous argument theta(t) (theta(0) = 0 since
w(0) = 1) gives

    int_{t1}^{t2} Im g_t(m) dt = (theta(t2) - theta(t1)) / gamma,

and the boundary values of theta(t)/pi at m = M0(lam + i0) are the
spectral-shift function xi_t(lam).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, StepFailure
from .herglotz import EpsSchedule, extrapolate
from .quadrature import adaptive_gl
from .sl2 import (CaseTag, LieElement, classify_case, cos_sin_pair, flow_apply, theta,
                  theta_limit)

log = logging.getLogger(__name__)

MIN_STEP = 1e-12
XI_TOL = 1e-6
_XI_EPS_POINTS = 5


@dataclass(frozen=True)
class LiftedPoint:
    log_modulus: float
    theta: float

    @property
    def sheet(self) -> int:
        return math.floor(self.theta / (2 * math.pi))

    @property
    def value(self) -> complex:
        return complex(np.exp(self.log_modulus + 1j * self.theta))


@dataclass(frozen=True)
class Trajectory:
    t_grid: np.ndarray
    log_modulus: np.ndarray
    theta: np.ndarray

    @property
    def points(self) -> list[LiftedPoint]:
        return [LiftedPoint(float(r), float(a)) for r, a in zip(self.log_modulus, self.theta)]

    def at_zero(self) -> LiftedPoint:
        k = int(np.flatnonzero(self.t_grid == 0.0)[0])
        return LiftedPoint(float(self.log_modulus[k]), float(self.theta[k]))

    def final(self) -> LiftedPoint:
        return LiftedPoint(float(self.log_modulus[-1]), float(self.theta[-1]))


def flow_w(X: LieElement, t, m):
    """w(t) = c_t m + d_t = C(t) + S(t) (gamma m - beta), broadcast over t and m."""
    c, s = cos_sin_pair(X.det, t)
    return c + s * (X.gamma * np.asarray(m) - X.beta)


def _initial_step(X: LieElement | None, span: float) -> float:
    h = span / 16.0 if span > 0 else 1.0
    if X is not None and classify_case(X) is CaseTag.CASE_I:
        h = min(h, 2 * math.pi / X.omega / 8.0)
    return h


def _accept(inc_whole, inc_left, inc_right):
    # an interval is trusted when its increment is small and splitting it
    # does not reveal a hidden turn
    return (np.abs(inc_whole) < math.pi / 2) & (
        np.abs(inc_left + inc_right - inc_whole) < 1e-2)


def lift_trajectory(X: LieElement | None, value_at, t1: float, t2: float, *,
                    min_step: float = MIN_STEP) -> Trajectory:
    """Track the continuous argument of value_at(t) over [min(t1,0), max(t2,0)].

    The grid always contains 0, where the argument is anchored at the
    principal value of value_at(0) (zero for flow trajectories, w(0) = 1).
    """
    lo, hi = min(t1, 0.0), max(t2, 0.0)
    h0 = _initial_step(X, hi - lo)
    left = np.linspace(lo, 0.0, max(2, int(math.ceil(-lo / h0)) + 1)) if lo < 0 else np.array([0.0])
    right = np.linspace(0.0, hi, max(2, int(math.ceil(hi / h0)) + 1)) if hi > 0 else np.array([0.0])
    grid = np.concatenate([left[:-1], right]) if lo < 0 else right
    # t1 and t2 are grid nodes so their arguments are read off, not interpolated
    grid = np.union1d(grid, [t1, t2])
    f = lambda t: np.asarray(value_at(np.asarray(t, dtype=float)), dtype=complex)
    vals = f(grid)
    while True:
        mids = 0.5 * (grid[1:] + grid[:-1])
        vm = f(mids)
        whole = np.angle(vals[1:] / vals[:-1])
        ok = _accept(whole, np.angle(vm / vals[:-1]), np.angle(vals[1:] / vm))
        if ok.all():
            break
        bad = np.flatnonzero(~ok)
        if np.min(grid[bad + 1] - grid[bad]) < min_step:
            raise StepFailure("argument increment not tamed at the minimum step; w(t) near 0?")
        grid = np.insert(grid, bad + 1, mids[bad])
        vals = np.insert(vals, bad + 1, vm[bad])
    inc = np.angle(vals[1:] / vals[:-1])
    theta_vals = np.concatenate([[0.0], np.cumsum(inc)])
    k0 = int(np.flatnonzero(grid == 0.0)[0])
    theta_vals += float(np.angle(vals[k0])) - theta_vals[k0]
    return Trajectory(grid, np.log(np.abs(vals)), theta_vals)


def lifted_arguments(w_of, t_end, *, initial_step: float, min_step: float = MIN_STEP):
    """Continuous argument at t_end[k] of many trajectories w_of(k, t) started at t=0.

    `w_of(idx, t)` evaluates trajectory idx[j] at time t[j]; all trajectories
    are refined together on a flat list of intervals.
    """
    t_end = np.asarray(t_end, dtype=float)
    n = t_end.size
    theta_out = np.angle(w_of(np.arange(n), np.zeros(n)))
    steps = max(1, int(math.ceil(np.max(np.abs(t_end), initial=0.0) / initial_step)))
    frac = np.linspace(0.0, 1.0, steps + 1)
    idx = np.repeat(np.arange(n), steps)
    ta = (t_end[:, None] * frac[None, :-1]).ravel()
    tb = (t_end[:, None] * frac[None, 1:]).ravel()
    keep = ta != tb
    idx, ta, tb = idx[keep], ta[keep], tb[keep]
    wa, wb = w_of(idx, ta), w_of(idx, tb)
    while idx.size:
        tm = 0.5 * (ta + tb)
        wm = w_of(idx, tm)
        whole = np.angle(wb / wa)
        ok = _accept(whole, np.angle(wm / wa), np.angle(wb / wm))
        np.add.at(theta_out, idx[ok], whole[ok])
        bad = ~ok
        if not bad.any():
            break
        if np.min(np.abs(tb[bad] - ta[bad])) < min_step:
            raise StepFailure("argument increment not tamed at the minimum step; w(t) near 0?")
        idx = np.concatenate([idx[bad], idx[bad]])
        ta, tb, wa, wb = (np.concatenate([ta[bad], tm[bad]]), np.concatenate([tm[bad], tb[bad]]),
                          np.concatenate([wa[bad], wm[bad]]), np.concatenate([wm[bad], wb[bad]]))
    return theta_out


def flow_arguments(X: LieElement, m, t):
    """theta(t) for w = c_t m + d_t at every (m, t) pair (broadcast)."""
    m, t = np.broadcast_arrays(np.asarray(m, dtype=complex), np.asarray(t, dtype=float))
    shape = m.shape
    mf, tf = m.ravel(), t.ravel()
    out = lifted_arguments(lambda k, s: flow_w(X, s, mf[k]), tf,
                           initial_step=_initial_step(X, 2 * float(np.max(np.abs(tf), initial=1.0))))
    return out.reshape(shape)


# --------------------------------------------------------------------------
# the integral identity


def _require_gamma(X: LieElement):
    if X.gamma == 0:
        raise PreconditionError("the flow needs gamma != 0")


def check_integral_identity(X: LieElement, z: complex, t1: float, t2: float, *,
                            tol: float = 1e-12) -> tuple[float, float, float]:
    """(lhs, rhs, residual) for int Im g_t(z) dt against the argument increment."""
    _require_gamma(X)
    if not complex(z).imag > 0:
        raise PreconditionError("need Im z > 0")
    lhs = adaptive_gl(lambda t: flow_apply(X, t, z).imag, t1, t2, tol=tol)
    traj = lift_trajectory(X, lambda t: flow_w(X, t, z), t1, t2)
    th = np.interp([t1, t2], traj.t_grid, traj.theta)
    rhs = float(th[1] - th[0]) / X.gamma
    return lhs, rhs, abs(lhs - rhs)


# --------------------------------------------------------------------------
# spectral-shift densities


@dataclass(frozen=True)
class XiSample:
    lambda_grid: np.ndarray
    xi_values: np.ndarray
    t1: float
    t2: float
    gamma: float
    converged: np.ndarray

    def to_csv(self, header: str = "") -> str:
        lines = [f"# {header}" if header else f"# t1={self.t1!r} t2={self.t2!r} gamma={self.gamma!r}",
                 "lambda,xi"]
        lines += [f"{float(lam)!r},{float(xi)!r}" for lam, xi in zip(self.lambda_grid, self.xi_values)]
        return "\n".join(lines) + "\n"


def _require_nonconstant(M0):
    if not float(np.asarray(M0(np.array([1j])))[0].imag) > 0:
        raise PreconditionError("the starting function must not be a real constant")


def _eps_tail(sched: EpsSchedule) -> np.ndarray:
    return sched.grid()[-_XI_EPS_POINTS:]


def xi_values(X: LieElement, M0, t: float, lambdas, sched: EpsSchedule = EpsSchedule()):
    """xi_t at each lambda: returns (values, converged)."""
    _require_gamma(X)
    _require_nonconstant(M0)
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if t == 0:
        return np.zeros(lambdas.shape), np.ones(lambdas.shape, dtype=bool)
    eps = _eps_tail(sched)
    m = M0(lambdas[:, None] + 1j * eps[None, :])
    th = flow_arguments(X, m, t) / math.pi
    seq = extrapolate(th.T, sched)
    return seq[-1], np.abs(seq[-1] - seq[-2]) <= XI_TOL


def xi_at(X: LieElement, M0, t: float, lam: float, sched: EpsSchedule = EpsSchedule()) -> float:
    vals, ok = xi_values(X, M0, t, [lam], sched)
    if not ok[0]:
        log.warning("xi_t(%g) did not settle across the eps schedule", lam)
    return float(vals[0])


def xi_density(X: LieElement, M0, t1: float, t2: float, lambda_grid,
               sched: EpsSchedule = EpsSchedule()) -> XiSample:
    _require_gamma(X)
    lambda_grid = np.atleast_1d(np.asarray(lambda_grid, dtype=float))
    if t1 == t2:
        zero = np.zeros(lambda_grid.shape)
        return XiSample(lambda_grid, zero, t1, t2, X.gamma, np.ones(lambda_grid.shape, bool))
    x2, ok2 = xi_values(X, M0, t2, lambda_grid, sched)
    x1, ok1 = xi_values(X, M0, t1, lambda_grid, sched)
    values = (x2 - x1) / X.gamma
    # pointwise values are sums of two continuous arguments over pi
    bound = (np.abs(x2) + np.abs(x1)) / abs(X.gamma) + 1.0
    assert np.all(np.abs(values) <= bound + 1e-9)
    return XiSample(lambda_grid, values, t1, t2, X.gamma, ok1 & ok2)


def averaged_im(X: LieElement, M0, t1: float, t2: float, z: complex, *, tol: float = 1e-11) -> float:
    """(1/pi) int_{t1}^{t2} Im M_t(z) dt at a point z of the upper half-plane."""
    m = complex(np.asarray(M0(np.array([z])))[0])
    return adaptive_gl(lambda t: flow_apply(X, t, m).imag, t1, t2, tol=tol) / math.pi


def xi_at_eps(X: LieElement, M0, t1: float, t2: float, z: complex) -> float:
    """(theta_{t2} - theta_{t1}) / (gamma pi) at a fixed point z (no eps limit)."""
    m = complex(np.asarray(M0(np.array([z])))[0])
    th = flow_arguments(X, np.array([m, m]), np.array([t2, t1]))
    return float(th[0] - th[1]) / (X.gamma * math.pi)


# --------------------------------------------------------------------------
# closed forms


def _arg_upper(v) -> np.ndarray:
    """Principal argument with exactly-real inputs read from the upper side."""
    v = np.asarray(v, dtype=complex)
    im = np.where(v.imag == 0, 0.0, v.imag)
    return np.arctan2(im, v.real)


def _recentred(X: LieElement, m0) -> np.ndarray:
    m0 = np.asarray(m0, dtype=complex)
    m0 = m0.real + 1j * np.maximum(m0.imag, 0.0)
    return X.gamma * m0 - X.beta


def _closed(gamma, tau1, tau2, mt) -> np.ndarray:
    num = tau2 * mt + 1
    den = -tau1 * mt - 1
    # keep +0 imaginary parts so real inputs land on the upper side
    num = num.real + 1j * np.where(num.imag == 0, 0.0, num.imag)
    den = den.real + 1j * np.where(den.imag == 0, 0.0, den.imag)
    return 1.0 / gamma + (_arg_upper(num) - _arg_upper(den)) / (gamma * math.pi)


def xi_closed_form(X: LieElement, m0, t1: float, t2: float):
    """xi_{t1,t2} from the boundary value m0 = lim M0(lam + i eps)."""
    if not X.gamma > 0:
        raise PreconditionError("the closed form needs gamma > 0")
    if not t1 < 0 < t2:
        raise PreconditionError("the closed form needs t1 < 0 < t2")
    out = _closed(X.gamma, theta(X, t1), theta(X, t2), _recentred(X, m0))
    return out if np.ndim(m0) else float(out)


def xi_global(X: LieElement, m0):
    """Density of the average over the whole parameter window."""
    if not X.gamma > 0:
        raise PreconditionError("the limit density needs gamma > 0")
    m0 = np.asarray(m0, dtype=complex)
    if classify_case(X) is not CaseTag.CASE_III:
        out = np.full(m0.shape, 1.0 / X.gamma)
    else:
        out = _closed(X.gamma, theta_limit(X, -1), theta_limit(X, 1), _recentred(X, m0))
    return out if np.ndim(m0) else float(out)


def xi_global_printed(X: LieElement, m0):
    """The variant with (pi m + 2 w)/(pi m - 2 w) in the logarithm; reported for comparison only."""
    if classify_case(X) is not CaseTag.CASE_III:
        return xi_global(X, m0)
    w = X.omega
    mt = _recentred(X, m0)
    num = math.pi * mt + 2 * w
    den = math.pi * mt - 2 * w
    out = 1.0 / X.gamma + (_arg_upper(num) - _arg_upper(den)) / (X.gamma * math.pi)
    return out if np.ndim(m0) else float(out)
