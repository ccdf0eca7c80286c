"""Herglotz functions: evaluation, boundary limits and Stieltjes inversion.

Every routine below accepts any vectorised callable z -> M(z) defined on the
open upper half-plane; `HerglotzRep` and `ConstantHerglotz` are the two
concrete representations shipped with the package.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, PreconditionError, QuadratureError
from .measures import MeasureSpec
from .quadrature import invert_on_contour

log = logging.getLogger(__name__)

BOUNDARY_RTOL = 1e-6


def _as_upper(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(~(z.imag > 0)):
        raise DomainError("evaluation requires Im z > 0")
    return z


@dataclass(frozen=True)
class HerglotzRep:
    """M(z) = A z + B + int (1/(lam - z) - lam/(1 + lam^2)) dmu(lam)."""

    A: float = 0.0
    B: float = 0.0
    mu: MeasureSpec = field(default_factory=MeasureSpec)
    _shift: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.A >= 0:
            raise ValueError("linear coefficient must be nonnegative")
        # int lam/(1+lam^2) dmu = Re S(i) with S the Stieltjes transform
        shift = 0.0 if self.mu.is_zero else float(self.mu.stieltjes(np.array([1j]))[0].real)
        object.__setattr__(self, "_shift", shift)

    @property
    def is_real_constant(self) -> bool:
        return self.A == 0 and self.mu.is_zero

    def __call__(self, z):
        z = _as_upper(z)
        return self.A * z + (self.B - self._shift) + self.mu.stieltjes(z)

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "mu": self.mu.to_json()}

    @classmethod
    def from_json(cls, doc: dict) -> "HerglotzRep":
        return cls(float(doc.get("A", 0.0)), float(doc.get("B", 0.0)),
                   MeasureSpec.from_json(doc.get("mu", {})))


@dataclass(frozen=True)
class ConstantHerglotz:
    """M(z) = value with Im value >= 0 (measure value.imag/pi times Lebesgue)."""

    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.value.imag < 0:
            raise ValueError("a Herglotz constant needs Im >= 0")

    @property
    def is_real_constant(self) -> bool:
        return self.value.imag == 0

    def __call__(self, z):
        z = _as_upper(z)
        return np.full(z.shape, self.value)

    def to_json(self) -> dict:
        return {"constant": {"re": self.value.real, "im": self.value.imag}}


def evaluate(M, z):
    return M(z)


def herglotz_from_json(doc: dict):
    if "constant" in doc:
        c = doc["constant"]
        return ConstantHerglotz(complex(c["re"], c["im"]))
    return HerglotzRep.from_json(doc)


# --------------------------------------------------------------------------
# epsilon limits


@dataclass(frozen=True)
class EpsSchedule:
    eps_max: float = 1e-2
    eps_min: float = 1e-8
    points_per_decade: int = 8
    extrapolation: str = "richardson"

    def __post_init__(self):
        if not 0 < self.eps_min < self.eps_max:
            raise ValueError("need 0 < eps_min < eps_max")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be positive")
        if self.extrapolation not in ("none", "richardson"):
            raise ValueError("extrapolation must be 'none' or 'richardson'")

    @property
    def ratio(self) -> float:
        return 10.0 ** (1.0 / self.points_per_decade)

    def grid(self) -> np.ndarray:
        """Descending geometric grid from eps_max to eps_min."""
        n = int(round(np.log10(self.eps_max / self.eps_min) * self.points_per_decade))
        return self.eps_max * self.ratio ** -np.arange(n + 1)

    def to_json(self) -> dict:
        return {"eps_max": self.eps_max, "eps_min": self.eps_min,
                "points_per_decade": self.points_per_decade,
                "extrapolation": self.extrapolation}

    @classmethod
    def from_json(cls, doc: dict) -> "EpsSchedule":
        return cls(**doc)


def extrapolate(values, sched: EpsSchedule) -> np.ndarray:
    """First-order Richardson along a descending geometric eps grid.

    Returns the extrapolated sequence (one shorter than `values` when
    extrapolating), indexed by the finer grid point of each pair.
    """
    values = np.asarray(values)
    if sched.extrapolation == "none":
        return values
    q = sched.ratio
    return (q * values[1:] - values[:-1]) / (q - 1.0)


@dataclass(frozen=True)
class BoundaryValue:
    lam: float
    value: complex
    converged: bool
    residual: float


def boundary_value(M, lam: float, sched: EpsSchedule = EpsSchedule(),
                   rtol: float = BOUNDARY_RTOL) -> BoundaryValue:
    eps = sched.grid()
    seq = extrapolate(M(lam + 1j * eps), sched)
    residual = float(abs(seq[-1] - seq[-2]))
    value = complex(seq[-1])
    converged = bool(np.isfinite(value)) and residual <= rtol * max(1.0, abs(value))
    return BoundaryValue(float(lam), value, converged, residual)


def atom_limits(M, lam0: float, sched: EpsSchedule = EpsSchedule()) -> tuple[float, float]:
    """Extrapolated limits of eps*Im M and eps*Re M at lam0 + i eps."""
    eps = sched.grid()
    seq = extrapolate(eps * M(lam0 + 1j * eps), sched)
    return float(seq[-1].imag), float(seq[-1].real)


def atom_mass(M, lam0: float, sched: EpsSchedule = EpsSchedule()) -> float:
    im_lim, re_lim = atom_limits(M, lam0, sched)
    if abs(re_lim) > BOUNDARY_RTOL * max(1.0, abs(im_lim)):
        log.warning("eps*Re M(%g + i eps) settles at %g, expected 0", lam0, re_lim)
    return max(im_lim, 0.0)


def _stable_tail(seq, per_decade: int, rtol: float = 1e-2) -> bool:
    """Relative change below rtol over the last decade of the grid."""
    tail = np.asarray(seq)[-(per_decade + 1):]
    ref = abs(tail[-1])
    return bool(np.isfinite(ref) and ref > 0 and np.max(np.abs(tail - tail[-1])) <= rtol * ref)


def normal_derivative(M, lam0: float, sched: EpsSchedule = EpsSchedule()) -> tuple[float, float]:
    """Real boundary value m and normal derivative m' > 0 at lam0."""
    eps = sched.grid()
    vals = M(lam0 + 1j * eps)
    ratio = vals.imag / eps
    if not _stable_tail(ratio, sched.points_per_decade):
        raise PreconditionError(
            f"Im M(lam0 + i eps)/eps does not settle in (0, inf) at lam0={lam0}")
    m = float(extrapolate(vals.real, sched)[-1])
    m_prime = float(extrapolate(ratio, sched)[-1])
    if not m_prime > 0:
        raise PreconditionError("normal derivative is not positive")
    return m, m_prime


def coefficient_A(M, ys=(1e2, 1e3, 1e4), rtol: float = 1e-6) -> float:
    """lim M(iy)/(iy) by polynomial extrapolation in 1/y."""
    ys = np.asarray(ys, dtype=float)
    f = (M(1j * ys) / (1j * ys)).real
    h = 1.0 / ys
    quad = np.polyfit(h, f, len(ys) - 1)[-1]
    lin = np.polyfit(h[-2:], f[-2:], 1)[-1]
    if abs(quad - lin) > rtol * max(1.0, abs(quad)):
        raise ConvergenceError(f"M(iy)/(iy) not settled: {lin!r} vs {quad!r}")
    return max(float(quad), 0.0) if quad > -rtol else float(quad)


def coefficient_B(M) -> float:
    return float(M(np.array([1j]))[0].real)


# --------------------------------------------------------------------------
# Stieltjes inversion


def _contour_floor(sched: EpsSchedule) -> float:
    return sched.eps_min ** 2


def stieltjes_invert(M, lo: float, hi: float, sched: EpsSchedule = EpsSchedule()) -> float:
    """mu((lo, hi)) + mu({lo})/2 + mu({hi})/2 recovered from M alone."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    value = invert_on_contour(M, lo, hi, y_floor=_contour_floor(sched))
    return max(value, 0.0)


def stieltjes_invert_direct(M, lo: float, hi: float, eps: float, atoms=()) -> float:
    """(1/pi) int_lo^hi Im M(lam + i eps) dlam on the real-shifted line.

    A plain adaptive rule with breakpoints clustered around declared atoms;
    kept as an independent route for cross-checks.
    """
    pts = []
    for a in atoms:
        for k in (-4, -1, -0.25, 0, 0.25, 1, 4):
            p = a + k * eps
            if lo < p < hi:
                pts.append(p)
    val, err = integrate.quad(lambda x: float(M(np.array([x + 1j * eps]))[0].imag), lo, hi,
                              points=sorted(set(pts)) or None, limit=2000,
                              epsabs=1e-13, epsrel=1e-12)
    if not err < 1e-8:
        raise QuadratureError(f"direct inversion error estimate {err:g}")
    return val / np.pi
