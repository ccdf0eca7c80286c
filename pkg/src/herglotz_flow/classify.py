"""Pointwise evidence for the invariant sets of a Herglotz function.

A point is AC when the boundary value lands in the open upper half-plane,
PP when eps*Im M or Im M/eps settles at a finite positive value, and SC
when neither holds but Im M scales with a stable fractional exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import PreconditionError
from .herglotz import EpsSchedule, boundary_value, normal_derivative
from .measures import (CantorComponent, MeasureSpec, cantor_cdf, fat_cantor_density, fat_cantor_gaps,
                       fat_cantor_k_point, measure_of_interval)
from .sl2 import GroupElement, LieElement, cos_sin_pair, flow_apply, mobius_apply

CANTOR_DIMENSION = math.log(2.0) / math.log(3.0)


class ClassKind(Enum):
    AC = "ac"
    PP = "pp"
    SC = "sc"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Thresholds:
    im_min: float = 1e-4
    settle_rtol: float = 1e-2
    kappa_lo: float = 0.05
    kappa_hi: float = 0.95
    r2_min: float = 0.99

    def fractional(self, kappa: float) -> bool:
        # after a Moebius map with c != 0 the exponent reflects to 2 - kappa
        return (self.kappa_lo < kappa < self.kappa_hi
                or 2.0 - self.kappa_hi < kappa < 2.0 - self.kappa_lo)


@dataclass(frozen=True)
class PointClass:
    kind: ClassKind
    evidence: dict = field(default_factory=dict)

    def to_json(self, lam: float) -> dict:
        return {"lambda": lam, "class": self.kind.value,
                "kappa_hat": self.evidence.get("kappa_hat"), "evidence": self.evidence}


@dataclass(frozen=True)
class ScalingEstimate:
    lam: float
    kappa_hat: float
    fit_r2: float
    eps_range: tuple[float, float]

    @property
    def fit_ok(self) -> bool:
        return self.fit_r2 > 0.99


def _eps_grid(eps_range, per_decade: int = 8) -> np.ndarray:
    lo, hi = eps_range
    n = int(round(math.log10(hi / lo) * per_decade)) + 1
    return np.geomspace(hi, lo, n)


def _im_profile(M0, lam: float, eps: np.ndarray) -> np.ndarray:
    return np.asarray(M0(lam + 1j * eps)).imag


def _regress(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    spread = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / spread if spread > 0 else 1.0
    return float(slope), float(r2)


def scaling_exponent(M0, lam: float, eps_range=(1e-8, 1e-2)) -> ScalingEstimate:
    """kappa_hat = 1 + slope of log Im M(lam + i eps) against log eps."""
    lo, hi = eps_range
    if not 1e-9 <= lo < hi <= 1e-1:
        raise PreconditionError("eps_range must lie within [1e-9, 1e-1]")
    eps = _eps_grid(eps_range)
    im = _im_profile(M0, lam, eps)
    if np.any(im <= 0):
        return ScalingEstimate(lam, math.nan, 0.0, (lo, hi))
    slope, r2 = _regress(np.log(eps), np.log(im))
    return ScalingEstimate(lam, 1.0 + slope, r2, (lo, hi))


def _settles(values: np.ndarray, per_decade: int, rtol: float) -> bool:
    last, decade_ago = values[-1], values[-1 - per_decade]
    return bool(np.isfinite(last) and last > 0 and abs(last - decade_ago) <= rtol * last)


def classify_point(M0, lam: float, sched: EpsSchedule = EpsSchedule(),
                   thresholds: Thresholds = Thresholds()) -> PointClass:
    bv = boundary_value(M0, lam, sched)
    evidence = {"boundary_value": [bv.value.real, bv.value.imag], "converged": bv.converged}
    if bv.converged and bv.value.imag > thresholds.im_min:
        return PointClass(ClassKind.AC, evidence)

    eps = sched.grid()
    im = _im_profile(M0, lam, eps)
    atom_like, smooth_like = eps * im, im / eps
    evidence["eps_im"] = float(atom_like[-1])
    evidence["im_over_eps"] = float(smooth_like[-1])
    if _settles(atom_like, sched.points_per_decade, thresholds.settle_rtol):
        return PointClass(ClassKind.PP, {**evidence, "branch": "eps_im"})
    if _settles(smooth_like, sched.points_per_decade, thresholds.settle_rtol):
        try:
            normal_derivative(M0, lam, sched)
            evidence["normal_derivative"] = True
        except PreconditionError:
            evidence["normal_derivative"] = False
        return PointClass(ClassKind.PP, {**evidence, "branch": "im_over_eps"})

    est = scaling_exponent(M0, lam, (max(sched.eps_min, 1e-9), min(sched.eps_max, 1e-1)))
    evidence.update(kappa_hat=est.kappa_hat, fit_r2=est.fit_r2)
    if est.fit_r2 > thresholds.r2_min and thresholds.fractional(est.kappa_hat):
        return PointClass(ClassKind.SC, evidence)
    return PointClass(ClassKind.UNDETERMINED, evidence)


@dataclass(frozen=True)
class MobiusImage:
    """z -> G(M0(z))."""

    G: GroupElement
    base: object

    def __call__(self, z):
        return mobius_apply(self.G, self.base(z))


@dataclass(frozen=True)
class InvarianceReport:
    agreements: int
    disagreements: int
    undetermined: int
    rows: tuple

    @property
    def passed(self) -> bool:
        return self.disagreements == 0


def invariance_check(M0, G: GroupElement, lambdas, sched: EpsSchedule = EpsSchedule(),
                     thresholds: Thresholds = Thresholds()) -> InvarianceReport:
    image = MobiusImage(G, M0)
    agree = disagree = undetermined = 0
    rows = []
    for lam in lambdas:
        a = classify_point(M0, lam, sched, thresholds).kind
        b = classify_point(image, lam, sched, thresholds).kind
        rows.append((float(lam), a.value, b.value))
        if ClassKind.UNDETERMINED in (a, b):
            undetermined += 1
        elif a is b:
            agree += 1
        else:
            disagree += 1
    return InvarianceReport(agree, disagree, undetermined, tuple(rows))


def random_group_element(rng: np.random.Generator, bound: float = 2.0) -> GroupElement:
    """Unit-determinant matrix with |a| >= 0.5 and b, c uniform in [-bound, bound]."""
    a = rng.uniform(0.5, bound) * rng.choice((-1.0, 1.0))
    b, c = rng.uniform(-bound, bound, size=2)
    return GroupElement(a, b, c, (1.0 + b * c) / a)


# --------------------------------------------------------------------------
# kappa-continuity of flowed measures


@dataclass(frozen=True)
class KappaRow:
    lam: float
    max_observed: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_observed) and self.max_observed <= self.bound * (1 + 1e-9))


def kappa_continuity_check(X: LieElement, M0, t: float, lambdas, kappa: float,
                           sched: EpsSchedule = EpsSchedule()) -> list[KappaRow]:
    """eps^(1-kappa) Im M_t against 1/(c_t^2 liminf eps^(kappa-1) Im M0) at each point."""
    c_t = X.gamma * float(cos_sin_pair(X.det, t)[1])
    if c_t == 0:
        raise PreconditionError("the bound needs c_t != 0")
    eps = sched.grid()
    rows = []
    for lam in lambdas:
        m0 = np.asarray(M0(lam + 1j * eps))
        im_t = flow_apply(X, t, m0).imag
        observed = eps ** (1.0 - kappa) * im_t
        lower = float(np.min(eps ** (kappa - 1.0) * m0.imag))
        bound = math.inf if lower <= 0 else 1.0 / (c_t * c_t * lower)
        rows.append(KappaRow(float(lam), float(np.max(observed)), bound))
    return rows


# --------------------------------------------------------------------------
# Cantor sampling and the fat Cantor counterexample


def cantor_typical_points(rng: np.random.Generator, count: int, lo: float = 0.0,
                          hi: float = 1.0, digits: int = 36) -> np.ndarray:
    """Points with random ternary digits in {0, 2}, i.e. samples of the Cantor measure."""
    d = 2.0 * rng.integers(0, 2, size=(count, digits))
    u = d @ (3.0 ** -np.arange(1, digits + 1))
    return lo + (hi - lo) * u


def cdf_scaling_exponent(component: CantorComponent, lam: float, deltas=None) -> float:
    """Local dimension from log(F(lam + d) - F(lam - d)) against log d."""
    deltas = np.geomspace(1e-2, 1e-8, 49) if deltas is None else np.asarray(deltas)
    mass = (np.asarray(cantor_cdf(component, lam + deltas), dtype=float)
            - np.asarray(cantor_cdf(component, lam - deltas), dtype=float))
    slope, _ = _regress(np.log(deltas), np.log(mass))
    return slope


@dataclass(frozen=True)
class FatCantorReport:
    removed_total: float
    k_measure: float
    k_points: tuple[float, ...]
    im_values: tuple[float, ...]
    eps: float
    support_cells: int
    support_min_mass: float
    gap_midpoint_class: ClassKind

    @property
    def passed(self) -> bool:
        return (abs(self.k_measure - (1.0 - self.removed_total)) <= 1e-12
                and max(self.im_values) <= 1e-2
                and self.support_min_mass > 0
                and self.gap_midpoint_class is ClassKind.AC)


def fat_cantor_counterexample(removed_total: float = 0.5, samples: int = 10, eps: float = 1e-6,
                              seed: int = 0, support_cells: int = 64) -> FatCantorReport:
    """mu = Lebesgue on the removed gaps; its support is [0, 1] yet Im M -> 0 on K."""
    if not 0.0 < removed_total < 1.0:
        raise PreconditionError("removed_total must lie in (0, 1)")
    from .herglotz import HerglotzRep

    mu = MeasureSpec(ac=(fat_cantor_density(removed_total),))
    M = HerglotzRep(0.0, 0.0, mu)
    k_measure = 1.0 - mu.total_mass
    rng = np.random.default_rng(seed)
    paths = ["".join(rng.choice(["L", "R"], size=12)) for _ in range(samples)]
    points = tuple(fat_cantor_k_point(removed_total, p) for p in paths)
    im = tuple(float(np.asarray(M(lam + 1j * eps)).imag) for lam in points)
    edges = np.linspace(0.0, 1.0, support_cells + 1)
    cell_mass = min(measure_of_interval(mu, a, b) for a, b in zip(edges[:-1], edges[1:]))
    first_gap = fat_cantor_gaps(removed_total, 1)[0]
    mid_class = classify_point(M, 0.5 * (first_gap[0] + first_gap[1])).kind
    return FatCantorReport(removed_total, k_measure, points, im, eps, support_cells,
                           float(cell_mass), mid_class)
