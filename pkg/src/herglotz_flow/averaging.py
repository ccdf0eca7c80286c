"""Flowed Herglotz functions and parameter averages of their measures.

M_t = g_t(M0) for the flow generated by X.  The average of mu_t(Delta) over
t is compared with the integral over Delta of the spectral-shift density,
over finite ranges and over the whole parameter window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .herglotz import (EpsSchedule, HerglotzRep, atom_limits, boundary_value,
                       coefficient_A, coefficient_B, stieltjes_invert)
from .measures import AcPiece, Atom, Constant, MeasureSpec, Polynomial
from .quadrature import (adaptive_gl, contour_plan, fit_power_tail, invert_on_contour,
                         log_spaced_edges)
from .rankone import FiniteModel
from .sl2 import (ROTATION, CaseTag, LieElement, classify_case, cos_sin_pair, flow_apply,
                  parameter_window)
from .winding import flow_arguments, flow_w, xi_values

DEFAULT_T_CUT = 1e4
ATOM_FLOOR = 1e-12


@dataclass(frozen=True)
class FlowedHerglotz:
    """z -> g_t(M0(z))."""

    X: LieElement
    t: float
    base: object

    def __call__(self, z):
        return flow_apply(self.X, self.t, self.base(z))


def _require_gamma(X: LieElement):
    if X.gamma == 0:
        raise PreconditionError("the flow needs gamma != 0")


# --------------------------------------------------------------------------
# the dynamical system on (A, B, mu)


@dataclass(frozen=True)
class FlowState:
    t: float
    A_t: float
    B_t: float
    interval_masses: tuple[tuple[tuple[float, float], float], ...]

    def mass(self, interval) -> float:
        return dict(self.interval_masses)[tuple(interval)]


def flow_state(X: LieElement, M0, t: float, intervals, sched: EpsSchedule = EpsSchedule()) -> FlowState:
    Mt = FlowedHerglotz(X, t, M0)
    masses = tuple((tuple(map(float, iv)), stieltjes_invert(Mt, iv[0], iv[1], sched))
                   for iv in intervals)
    a_t = coefficient_A(Mt)
    c_t = X.gamma * float(cos_sin_pair(X.det, t)[1])
    if X.gamma != 0 and c_t != 0 and a_t > 1e-8:
        raise AssertionError(f"linear coefficient {a_t:g} should vanish when c_t != 0")
    return FlowState(float(t), a_t, coefficient_B(Mt), masses)


# --------------------------------------------------------------------------
# t-sweeps of interval masses


class MassSweep:
    """t -> mu_t((lo, hi)) with half weights at the ends, vectorised over t.

    M0 is sampled once on a deformed inversion contour; each t costs one
    Moebius map per contour node.
    """

    def __init__(self, X: LieElement, M0, lo: float, hi: float, y_floor: float):
        self.X = X
        self.plan = contour_plan(lo, hi, y_floor=y_floor, panel_width=1.0, order=20, top_panels=4)
        self.m0 = np.asarray(M0(self.plan.nodes))

    def __call__(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        out = np.empty(ts.shape)
        for k in range(0, ts.size, 256):
            chunk = ts[k:k + 256]
            vals = flow_apply(self.X, chunk[:, None], self.m0[None, :])
            out[k:k + 256] = self.plan.apply(vals)
        return out


def _real_boundary(M0, p: float, sched: EpsSchedule):
    """('atom', None), ('real', m) or (None, None) for the boundary behaviour at p."""
    if atom_limits(M0, p, sched)[0] > ATOM_FLOOR:
        return "atom", None
    bv = boundary_value(M0, p, sched)
    if bv.converged and abs(bv.value.imag) <= 1e-8 * max(1.0, abs(bv.value)):
        return "real", bv.value.real
    return None, None


def crossing_times(X: LieElement, M0, points, t1: float, t2: float,
                   sched: EpsSchedule = EpsSchedule()) -> list[float]:
    """Times in [t1, t2] at which an atom of mu_t sits at one of the points."""
    case = classify_case(X)
    w = X.omega
    out = set()
    for p in points:
        kind, m = _real_boundary(M0, p, sched)
        if kind is None:
            continue
        if kind == "atom":
            # c_t = 0: t = k pi / w in case I, t = 0 otherwise
            base, period = 0.0, (math.pi / w if case is CaseTag.CASE_I else None)
        else:
            u = X.gamma * m - X.beta
            if case is CaseTag.CASE_II:
                if u != 0:
                    out.add(-1.0 / u)
                continue
            if case is CaseTag.CASE_III:
                if u != 0 and abs(w / u) < 1:
                    out.add(math.atanh(-w / u) / w)
                continue
            base = (math.atan(-w / u) if u != 0 else math.pi / 2) / w
            period = math.pi / w
        if period is None:
            out.add(base)
            continue
        lo_k = math.ceil((max(t1, -1e6) - base) / period)
        hi_k = math.floor((min(t2, 1e6) - base) / period)
        for k in range(lo_k, hi_k + 1):
            out.add(base + k * period)
    return sorted(t for t in out if t1 < t < t2)


def _atoms_of(M0) -> list[float]:
    if isinstance(M0, HerglotzRep):
        return [a.position for a in M0.mu.atoms]
    if isinstance(M0, FiniteModel):
        return list(M0.eigenvalues)
    return []


def average_over_t(X: LieElement, M0, interval, t1: float, t2: float,
                   sched: EpsSchedule = EpsSchedule(), *, tol: float = 1e-10) -> float:
    """int_{t1}^{t2} mu_t(interval) dt with breakpoints at boundary crossings."""
    if t1 == t2:
        return 0.0
    lo, hi = interval
    sweep = MassSweep(X, M0, lo, hi, sched.eps_min**2)
    cuts = crossing_times(X, M0, (lo, hi), min(t1, t2), max(t1, t2), sched)
    return adaptive_gl(sweep, t1, t2, breakpoints=cuts, tol=tol)


# --------------------------------------------------------------------------
# integrals of the spectral-shift density


def integrate_xi_contour(X: LieElement, M0, interval, t1: float, t2: float,
                         sched: EpsSchedule = EpsSchedule()) -> float:
    """int_Delta xi_{t1,t2} via the analytic function (Ln w_{t2} - Ln w_{t1})/gamma.

    Its imaginary part over pi is the density at every height, so the same
    contour inversion that recovers measures recovers int xi.
    """
    _require_gamma(X)
    if t1 == t2:
        return 0.0

    lo, hi = interval
    top = hi - lo

    def F(z):
        m = M0(z)
        w2, w1 = flow_w(X, t2, m), flow_w(X, t1, m)
        # only the top edge weighs Im F; the vertical legs may pass next to
        # zeros of w, where lifting is ill-posed but log|w| is harmless
        dtheta = np.zeros(m.shape)
        on_top = z.imag >= top * (1 - 1e-12)
        mt = m[on_top]
        th = flow_arguments(X, np.stack([mt, mt]), np.array([[t2], [t1]]))
        dtheta[on_top] = th[0] - th[1]
        return (np.log(np.abs(w2)) - np.log(np.abs(w1)) + 1j * dtheta) / X.gamma

    return invert_on_contour(F, lo, hi, y_floor=sched.eps_min**2, tol=1e-8)


def integrate_xi_pointwise(X: LieElement, M0, interval, t1: float, t2: float,
                           sched: EpsSchedule = EpsSchedule(), *, tol: float = 1e-8) -> float:
    """int_Delta xi_{t1,t2} from pointwise eps-limits, adaptive in lambda."""
    _require_gamma(X)
    if t1 == t2:
        return 0.0
    lo, hi = interval

    def xi(lams):
        x2, _ = xi_values(X, M0, t2, lams, sched)
        x1, _ = xi_values(X, M0, t1, lams, sched)
        return (x2 - x1) / X.gamma

    cuts = [a for a in _atoms_of(M0) if lo < a < hi]
    return adaptive_gl(xi, lo, hi, breakpoints=cuts, tol=tol)


@dataclass(frozen=True)
class CheckResult:
    name: str
    lhs: float
    rhs: float
    residual: float
    budget: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.budget)

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
                "budget": self.budget, "pass": self.passed, **self.extra}


def verify_mz(X: LieElement, M0, interval, t1: float, t2: float,
              sched: EpsSchedule = EpsSchedule(), *, method: str = "contour",
              budget: float = 1e-6) -> CheckResult:
    """t-average of mu_t(Delta) against int_Delta xi_{t1,t2}."""
    _require_gamma(X)
    lhs = average_over_t(X, M0, interval, t1, t2, sched)
    if method == "contour":
        rhs = integrate_xi_contour(X, M0, interval, t1, t2, sched)
    elif method == "pointwise":
        rhs = integrate_xi_pointwise(X, M0, interval, t1, t2, sched)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CheckResult(f"mz {interval} [{t1}, {t2}] ({method})", lhs, rhs, abs(lhs - rhs), budget)


# --------------------------------------------------------------------------
# averages over the whole parameter window


@dataclass(frozen=True)
class GlobalResult:
    value: float
    case: CaseTag
    core: float
    tail: float
    tail_exponents: tuple[float, float]


def global_average(X: LieElement, M0, interval, sched: EpsSchedule = EpsSchedule(), *,
                   T_cut: float = DEFAULT_T_CUT, tol: float = 1e-10) -> GlobalResult:
    """|gamma| int mu_t(Delta) dt over the full window (truncated plus fitted tails)."""
    _require_gamma(X)
    case = classify_case(X)
    lo, hi = interval
    sweep = MassSweep(X, M0, lo, hi, sched.eps_min**2)
    scale = abs(X.gamma)
    if case is CaseTag.CASE_I:
        a, b = parameter_window(X)
        cuts = crossing_times(X, M0, (lo, hi), a, b, sched)
        core = adaptive_gl(sweep, a, b, breakpoints=cuts, tol=tol)
        return GlobalResult(scale * core, case, scale * core, 0.0, (math.nan, math.nan))
    cuts = set(log_spaced_edges(T_cut)) | set(crossing_times(X, M0, (lo, hi), -T_cut, T_cut, sched))
    core = adaptive_gl(sweep, -T_cut, T_cut, breakpoints=sorted(cuts), tol=tol)
    left, p_left = fit_power_tail(lambda s: sweep(-s), T_cut)
    right, p_right = fit_power_tail(lambda s: sweep(s), T_cut)
    tail = left + right
    return GlobalResult(scale * (core + tail), case, scale * core, scale * tail, (p_left, p_right))


def global_density_function(X: LieElement, M0):
    """Analytic F with Im F / pi equal to the whole-window density at every height."""
    if not X.gamma > 0:
        raise PreconditionError("the limit density needs gamma > 0")
    if classify_case(X) is not CaseTag.CASE_III:
        return lambda z: np.asarray(z, dtype=complex) * 0 + 1j * math.pi / X.gamma
    w = X.omega

    def F(z):
        u = X.gamma * M0(z) - X.beta
        return (np.log(1 + u / w) - np.log(1 - u / w)) / X.gamma

    return F


def integrate_xi_global(X: LieElement, M0, interval, sched: EpsSchedule = EpsSchedule()) -> float:
    lo, hi = interval
    return invert_on_contour(global_density_function(X, M0), lo, hi,
                             y_floor=sched.eps_min**2, tol=1e-8)


def printed_global_density(X: LieElement, M0, interval, sched: EpsSchedule = EpsSchedule()) -> float:
    """int_Delta of the density with (pi m + 2w)/(pi m - 2w) inside the log (comparison only)."""
    if classify_case(X) is not CaseTag.CASE_III:
        return integrate_xi_global(X, M0, interval, sched)
    w = X.omega

    def F(z):
        u = X.gamma * M0(z) - X.beta
        return (np.log(1 + math.pi * u / (2 * w)) - np.log(1 - math.pi * u / (2 * w))) / X.gamma

    lo, hi = interval
    return invert_on_contour(F, lo, hi, y_floor=sched.eps_min**2, tol=1e-8)


# --------------------------------------------------------------------------
# part-resolved averages


def _intersect(a, b):
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return (lo, hi) if lo < hi else None


@dataclass(frozen=True)
class InvariantSets:
    """Declared supports: finite unions of open intervals per spectral type.

    Isolated points (atoms, edges) carry no mass for the averaged measure,
    which is absolutely continuous, and are kept only for bookkeeping.
    """

    ac: tuple[tuple[float, float], ...] = ()
    sc: tuple[tuple[float, float], ...] = ()
    pp: tuple[tuple[float, float], ...] = ()
    points: tuple[float, ...] = ()

    def pieces(self, part: str, interval) -> list[tuple[float, float]]:
        if part not in ("ac", "sc", "pp"):
            raise ValueError(f"unknown part {part!r}")
        out = [_intersect(iv, interval) for iv in getattr(self, part)]
        return [iv for iv in out if iv is not None]


def part_average(X: LieElement, M0, interval, t1, t2, part: str, sets: InvariantSets | None,
                 sched: EpsSchedule = EpsSchedule()) -> float:
    """Averaged mass of interval intersected with the declared set for `part`.

    With t1 = t2 = None the whole window is used and the value is scaled by
    |gamma|, matching global_average.
    """
    if sets is None:
        raise PreconditionError("part averages need declared invariant sets")
    total = 0.0
    for piece in sets.pieces(part, interval):
        if t1 is None and t2 is None:
            total += global_average(X, M0, piece, sched).value
        else:
            total += average_over_t(X, M0, piece, t1, t2, sched)
    return total


def part_rows(X: LieElement, M0, interval, t1, t2, sets: InvariantSets,
              sched: EpsSchedule = EpsSchedule()) -> dict[str, float]:
    return {part: part_average(X, M0, interval, t1, t2, part, sets, sched)
            for part in ("ac", "sc", "pp")}


# --------------------------------------------------------------------------
# the extension family


@dataclass(frozen=True)
class KreinFunction:
    """N(z) = z + (1 + z^2) M(z)."""

    base: object

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return z + (1 + z * z) * self.base(z)


@dataclass(frozen=True)
class ExtensionFamily:
    base_M: object
    nu: MeasureSpec

    @property
    def N(self) -> KreinFunction:
        return KreinFunction(self.base_M)


def _times_one_plus_square(piece: AcPiece) -> AcPiece:
    d = piece.density
    if isinstance(d, Constant):
        coeffs = (d.c, 0.0, d.c)
    elif isinstance(d, Polynomial):
        coeffs = tuple(np.polynomial.polynomial.polymul(d.coeffs, (1.0, 0.0, 1.0)))
    else:
        raise PreconditionError("extension family supports constant/polynomial densities only")
    return AcPiece(piece.lo, piece.hi, Polynomial(coeffs))


def extension_family(M) -> ExtensionFamily:
    """Krein family of a probability-measure transform M(z) = int dmu/(lam - z)."""
    if isinstance(M, FiniteModel):
        atoms = tuple(Atom(l, p * p * (1 + l * l)) for l, p in zip(M.eigenvalues, M.vector))
        return ExtensionFamily(M, MeasureSpec(atoms=atoms))
    if not isinstance(M, HerglotzRep):
        raise PreconditionError("extension family needs a FiniteModel or HerglotzRep")
    if M.A != 0 or M.mu.cantor:
        raise PreconditionError("extension family needs A = 0 and no singular continuous part")
    shift = float(M.mu.stieltjes(np.array([1j]))[0].real)
    if abs(M.B - shift) > 1e-12 or abs(M.mu.total_mass - 1.0) > 1e-10:
        raise PreconditionError("M must be the plain transform of a probability measure")
    nu = MeasureSpec(
        atoms=tuple(Atom(a.position, a.weight * (1 + a.position**2)) for a in M.mu.atoms),
        ac=tuple(_times_one_plus_square(p) for p in M.mu.ac),
    )
    return ExtensionFamily(M, nu)


@dataclass(frozen=True)
class ExtensionResult:
    value: float
    printed_normalization: float
    reparam_residual: float


def reparametrization_residual(fam: ExtensionFamily, zs) -> float:
    """max |f_{tan s}(N) - g_s(N)| with g_s the rotation flow, over s and sample z."""
    n = fam.N(np.asarray(zs, dtype=complex))
    s = np.linspace(-1.5, 1.5, 31)[:, None]
    t = np.tan(s)
    f_t = (n[None, :] - t) / (t * n[None, :] + 1)
    return float(np.max(np.abs(f_t - flow_apply(ROTATION, s, n[None, :]))))


def extension_average(fam: ExtensionFamily, interval, sched: EpsSchedule = EpsSchedule(),
                      zs=(0.3 + 0.5j, -1.2 + 0.1j, 2.0 + 2.0j, 1j)) -> ExtensionResult:
    """int dt/(1+t^2) nu_t(Delta) by t = tan s, i.e. the rotation window average of N."""
    value = global_average(ROTATION, fam.N, interval, sched).value
    return ExtensionResult(value, value / math.pi, reparametrization_residual(fam, zs))
