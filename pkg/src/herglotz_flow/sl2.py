"""One-parameter subgroups of SL2(R) and their Moebius action.

A traceless generator X = [[beta, alpha], [gamma, -beta]] satisfies
X^2 = -det(X) I, so exp(tX) = C(t) I + S(t) X with C, S the cos/sin,
1/t or cosh/sinh pair selected by the sign of det(X).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import mpmath
import numpy as np

from .errors import DomainError

DET_ZERO_TOL = 1e-14
TRACE_TOL = 1e-12
_SERIES_CUTOFF = 0.5   # use the Taylor form of C, S when |det| t^2 is below this
_SERIES_TERMS = 18


class CaseTag(Enum):
    CASE_I = "I"      # det > 0, compact (rotation-like)
    CASE_II = "II"    # det = 0, unipotent
    CASE_III = "III"  # det < 0, split (boost-like)


class MobiusClass(Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class LieElement:
    alpha: float
    beta: float
    gamma: float

    @property
    def det(self) -> float:
        return -self.alpha * self.gamma - self.beta**2

    @property
    def omega(self) -> float:
        return math.sqrt(abs(self.det))

    def matrix(self) -> np.ndarray:
        return np.array([[self.beta, self.alpha], [self.gamma, -self.beta]], dtype=float)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}

    @classmethod
    def from_json(cls, doc: dict) -> "LieElement":
        return cls(float(doc["alpha"]), float(doc["beta"]), float(doc["gamma"]))


ROTATION = LieElement(-1.0, 0.0, 1.0)
UNIPOTENT = LieElement(0.0, 0.0, 1.0)
BOOST = LieElement(1.0, 0.0, 1.0)


@dataclass(frozen=True)
class GroupElement:
    """Real unimodular matrix [[a, b], [c, d]]; entries may be mpmath numbers."""

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        ad, bc = self.a * self.d, self.b * self.c
        scale = max(1.0, float(abs(ad)) + float(abs(bc)))
        if float(abs(ad - bc - 1)) > 1e-12 * scale:
            raise ValueError("group element must have unit determinant")

    @property
    def trace(self):
        return self.a + self.d

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        return mobius_apply(self, z)


IDENTITY = GroupElement(1.0, 0.0, 0.0, 1.0)


# --------------------------------------------------------------------------
# exponential


def classify_case(X: LieElement, tol: float = DET_ZERO_TOL) -> CaseTag:
    det = X.det
    if abs(det) <= tol:
        return CaseTag.CASE_II
    return CaseTag.CASE_I if det > 0 else CaseTag.CASE_III


def cos_sin_pair(det: float, t):
    """C(t), S(t) with exp(tX) = C I + S X, vectorised over t.

    Near det t^2 = 0 both come from their even power series in -det t^2,
    which joins the three cases without cancellation.
    """
    t = np.asarray(t, dtype=float)
    x = -det * t * t
    small = np.abs(x) < _SERIES_CUTOFF
    cs, ss = np.zeros_like(t), np.zeros_like(t)
    term_c, term_s = np.ones_like(t), np.ones_like(t)
    xs = np.where(small, x, 0.0)
    for k in range(_SERIES_TERMS):
        cs = cs + term_c
        ss = ss + term_s
        term_c = term_c * xs / ((2 * k + 1) * (2 * k + 2))
        term_s = term_s * xs / ((2 * k + 2) * (2 * k + 3))
    ss = ss * t
    if det == 0.0 or np.all(small):
        return cs, ss
    w = math.sqrt(abs(det))
    with np.errstate(over="ignore"):
        if det > 0:
            c_big, s_big = np.cos(w * t), np.sin(w * t) / w
        else:
            c_big, s_big = np.cosh(w * t), np.sinh(w * t) / w
    return np.where(small, cs, c_big), np.where(small, ss, s_big)


def _cos_sin_mp(det, t):
    if det == 0:
        return mpmath.mpf(1), t
    w = mpmath.sqrt(abs(det))
    if det > 0:
        return mpmath.cos(w * t), mpmath.sin(w * t) / w
    return mpmath.cosh(w * t), mpmath.sinh(w * t) / w


def exponential(X: LieElement, t: float, *, dps: int | None = None) -> GroupElement:
    """exp(tX); with `dps` the entries are mpmath numbers at that precision."""
    if dps is not None:
        with mpmath.workdps(dps):
            al, be, ga = (mpmath.mpf(v) for v in (X.alpha, X.beta, X.gamma))
            c, s = _cos_sin_mp(-al * ga - be * be, mpmath.mpf(t))
            return GroupElement(c + be * s, al * s, ga * s, c - be * s)
    a, b, c, d = exponential_entries(X, t)
    return GroupElement(float(a), float(b), float(c), float(d))


def exponential_entries(X: LieElement, t):
    """Arrays a_t, b_t, c_t, d_t over a t-grid."""
    cs, ss = cos_sin_pair(X.det, t)
    b, c = X.alpha * ss, X.gamma * ss
    plus, minus = cs + X.beta * ss, cs - X.beta * ss
    # C - beta S cancels once exp(w|t|) is large; rebuild the smaller
    # diagonal entry from ad - bc = 1 instead
    with np.errstate(divide="ignore", invalid="ignore"):
        big_plus = np.abs(plus) >= np.abs(minus)
        rebuild = np.maximum(np.abs(plus), np.abs(minus)) > 2.0
        a = np.where(rebuild & ~big_plus, (1 + b * c) / minus, plus)
        d = np.where(rebuild & big_plus, (1 + b * c) / plus, minus)
    return a, b, c, d


def ode_oracle(X: LieElement, t: float) -> GroupElement:
    """exp(tX) by scaling and squaring of a truncated Taylor series."""
    m = t * X.matrix()
    norm = np.abs(m).sum(axis=1).max()
    squarings = max(0, int(math.ceil(math.log2(norm / 0.25)))) if norm > 0 else 0
    m = m / 2.0**squarings
    out, term = np.eye(2), np.eye(2)
    for k in range(1, 25):
        term = term @ m / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return GroupElement(*out.ravel())


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """Matrix product g1 g2 rescaled to unit determinant."""
    a = g1.a * g2.a + g1.b * g2.c
    b = g1.a * g2.b + g1.b * g2.d
    c = g1.c * g2.a + g1.d * g2.c
    d = g1.c * g2.b + g1.d * g2.d
    det = a * d - b * c
    root = mpmath.sqrt(det) if isinstance(det, mpmath.mpf) else math.sqrt(det)
    return GroupElement(a / root, b / root, c / root, d / root)


def group_law_check(X: LieElement, s: float, t: float, *, dps: int | None = None) -> float:
    """Max-entry residual of exp((s+t)X) - exp(sX) exp(tX)."""
    if dps is None:
        lhs = exponential(X, s + t)
        rhs = compose(exponential(X, s), exponential(X, t))
        return float(max(abs(u - v) for u, v in zip(_entries(lhs), _entries(rhs))))
    with mpmath.workdps(dps):
        total = mpmath.mpf(s) + mpmath.mpf(t)
        lhs = exponential(X, total, dps=dps)
        rhs = compose(exponential(X, s, dps=dps), exponential(X, t, dps=dps))
        return float(max(abs(u - v) for u, v in zip(_entries(lhs), _entries(rhs))))


def _entries(g: GroupElement):
    return g.a, g.b, g.c, g.d


def classify_mobius(g: GroupElement, tol: float = TRACE_TOL) -> MobiusClass:
    a, b, c, d = (float(v) for v in _entries(g))
    if max(abs(b), abs(c), abs(a - d)) <= tol and abs(abs(a) - 1.0) <= tol:
        return MobiusClass.IDENTITY
    tr = abs(a + d)
    if abs(tr - 2.0) <= tol:
        return MobiusClass.PARABOLIC
    return MobiusClass.ELLIPTIC if tr < 2.0 else MobiusClass.HYPERBOLIC


def mobius_apply(g: GroupElement, z):
    z = np.asarray(z, dtype=complex)
    if np.any(~(z.imag > 0)):
        raise DomainError("Moebius action is applied on Im z > 0 only")
    a, b, c, d = (float(v) for v in _entries(g))
    return (a * z + b) / (c * z + d)


# --------------------------------------------------------------------------
# the Theta parametrisation of trajectories


def parameter_window(X: LieElement) -> tuple[float, float]:
    if classify_case(X) is CaseTag.CASE_I:
        half = math.pi / (2.0 * X.omega)
        return -half, half
    return -math.inf, math.inf


def theta(X: LieElement, t):
    """Theta(t) = S(t)/C(t): tan(wt)/w, t or tanh(wt)/w."""
    lo, hi = parameter_window(X)
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr <= lo) | (t_arr >= hi)):
        raise DomainError("t lies outside the parameter window")
    c, s = cos_sin_pair(X.det, t_arr)
    out = s / c
    if classify_case(X) is CaseTag.CASE_III:
        w = X.omega
        out = np.where(np.isfinite(out), out, np.sign(t_arr) / w)
    return out if np.ndim(t) else float(out)


def theta_limit(X: LieElement, sign: int) -> float:
    """Theta at the end of the window: +-inf unless det < 0, then +-1/omega."""
    case = classify_case(X)
    if case is CaseTag.CASE_III:
        return math.copysign(1.0 / X.omega, sign)
    return math.copysign(math.inf, sign)


def trajectory_map(X: LieElement, tau, z):
    """F_tau(z) = ((1 + beta tau) z + alpha tau)/(gamma tau z + 1 - beta tau)."""
    tau = np.asarray(tau, dtype=float)
    z = np.asarray(z, dtype=complex)
    return ((1 + X.beta * tau) * z + X.alpha * tau) / (X.gamma * tau * z + 1 - X.beta * tau)


def flow_apply(X: LieElement, t, m):
    """g_t(m) = exp(tX) acting on m, broadcast over t and m.

    Outside case I the entries grow like exp(w|t|); the Theta form keeps
    the real part bounded and rebuilds the imaginary part from
    Im g(m) = Im m / |c m + d|^2, which stays accurate as it decays.
    """
    t = np.asarray(t, dtype=float)
    m = np.asarray(m, dtype=complex)
    case = classify_case(X)
    if case is CaseTag.CASE_I:
        a, b, c, d = exponential_entries(X, t)
        return (a * m + b) / (c * m + d)
    cs, ss = cos_sin_pair(X.det, t)
    with np.errstate(over="ignore", invalid="ignore"):
        tau = ss / cs
        if case is CaseTag.CASE_III:
            tau = np.where(np.isfinite(tau), tau, np.sign(t) / X.omega)
        sech2 = np.where(np.isfinite(cs), 1.0 / (cs * cs), 0.0)
    den = X.gamma * tau * m + 1 - X.beta * tau
    num = (1 + X.beta * tau) * m + X.alpha * tau
    val = num / den
    im = m.imag * sech2 / np.abs(den) ** 2
    return val.real + 1j * im
