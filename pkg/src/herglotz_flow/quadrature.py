"""Gauss-Legendre panel quadrature and contour-deformed Stieltjes inversion.

The inversion integral (1/pi) int_lo^hi Im M(lam + i y0) dlam is evaluated by
moving the path off the real axis.  Cauchy's theorem on the rectangle
[lo, hi] x [y0, H] turns it into

    (1/pi) [ V(lo) - V(hi) + T ],   V(p) = int_y0^H Re M(p + iy) dy,
                                    T    = int_lo^hi Im M(lam + iH) dlam.

The vertical legs are integrated in u = log y, where the integrand stays
analytic in a strip of half-width pi/2 whatever the distance from p to the
nearest atom, so fixed-order panels resolve atoms at every scale without
knowing where they are.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

DEFAULT_Y_FLOOR = 1e-16


@lru_cache(maxsize=None)
def gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_panels(edges, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite rule on consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    x, w = gl_rule(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def adaptive_gl(f, a: float, b: float, *, breakpoints=(), tol: float = 1e-10,
                order: int = 16, max_rounds: int = 60) -> float:
    """Adaptive composite Gauss-Legendre for a vectorised integrand.

    Each panel is compared with its two halves; panels whose local error
    exceeds a share of `tol` proportional to their width are split.  Jumps
    should be passed as breakpoints; an unlisted jump still converges, at
    the cost of about forty bisection levels.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    cuts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    panels = np.array(list(zip(cuts[:-1], cuts[1:])), dtype=float)
    x, w = gl_rule(order)
    total = 0.0
    width = b - a
    for _ in range(max_rounds):
        lo, hi = panels[:, 0], panels[:, 1]
        mid = 0.5 * (lo + hi)
        # whole panel and two halves in one evaluation
        half_c = 0.25 * (hi - lo)
        c_left, c_right = 0.5 * (lo + mid), 0.5 * (mid + hi)
        c_whole = mid
        pts = np.concatenate([
            (c_whole[:, None] + 2 * half_c[:, None] * x).ravel(),
            (c_left[:, None] + half_c[:, None] * x).ravel(),
            (c_right[:, None] + half_c[:, None] * x).ravel(),
        ])
        vals = np.asarray(f(pts), dtype=float).reshape(3, len(panels), order)
        coarse = 2 * half_c * (vals[0] @ w)
        fine = half_c * (vals[1] @ w + vals[2] @ w)
        err = np.abs(fine - coarse)
        # the roundoff floor keeps tiny panels from chasing noise
        floor = 64 * np.finfo(float).eps * half_c * (np.abs(vals[1]) @ w + np.abs(vals[2]) @ w)
        # the absolute share lets panels straddling an unlisted jump close out
        ok = err <= np.maximum(np.maximum(tol * (hi - lo) / width, 1e-3 * tol), floor)
        total += fine[ok].sum()
        if ok.all():
            return sign * total
        bad = panels[~ok]
        bmid = 0.5 * (bad[:, 0] + bad[:, 1])
        panels = np.concatenate([np.stack([bad[:, 0], bmid], 1),
                                 np.stack([bmid, bad[:, 1]], 1)])
        if np.min(panels[:, 1] - panels[:, 0]) < 1e-15 * max(1.0, abs(a), abs(b)):
            raise QuadratureError("adaptive rule hit the minimum panel width")
    raise QuadratureError("adaptive rule did not converge")


@dataclass(frozen=True)
class ContourPlan:
    """Nodes z_k with weights so that mass = sum(w_re Re M + w_im Im M)/pi."""

    nodes: np.ndarray
    w_re: np.ndarray
    w_im: np.ndarray

    def apply(self, values) -> np.ndarray:
        values = np.asarray(values)
        return (values.real @ self.w_re + values.imag @ self.w_im) / np.pi


def contour_plan(lo: float, hi: float, *, y_floor: float = DEFAULT_Y_FLOOR,
                 panel_width: float = 2.0, order: int = 16,
                 top_panels: int = 2) -> ContourPlan:
    if not lo < hi:
        raise ValueError("need lo < hi")
    height = hi - lo
    y0 = y_floor * max(1.0, height)
    ulo, uhi = np.log(y0), np.log(height)
    n_vert = max(1, int(np.ceil((uhi - ulo) / panel_width)))
    u, wu = gl_panels(np.linspace(ulo, uhi, n_vert + 1), order)
    y = np.exp(u)
    wy = wu * y
    lam, wl = gl_panels(np.linspace(lo, hi, top_panels + 1), order)
    nodes = np.concatenate([lo + 1j * y, hi + 1j * y, lam + 1j * height])
    zeros_v = np.zeros_like(wy)
    w_re = np.concatenate([wy, -wy, np.zeros_like(wl)])
    w_im = np.concatenate([zeros_v, zeros_v, wl])
    return ContourPlan(nodes, w_re, w_im)


def refined_plans(lo: float, hi: float, y_floor: float = DEFAULT_Y_FLOOR):
    """A working plan and a refined plan used as its error estimate."""
    return (contour_plan(lo, hi, y_floor=y_floor),
            contour_plan(lo, hi, y_floor=y_floor, panel_width=1.0, top_panels=4, order=20))


def invert_on_contour(evaluator, lo: float, hi: float, *, y_floor: float = DEFAULT_Y_FLOOR,
                      tol: float = 1e-9) -> float:
    """(1/pi) int_lo^hi Im F(lam + i y0) dlam for F analytic in the upper half-plane."""
    coarse, fine = refined_plans(lo, hi, y_floor)
    a = float(coarse.apply(evaluator(coarse.nodes)))
    b = float(fine.apply(evaluator(fine.nodes)))
    if abs(a - b) > tol * max(1.0, abs(b)):
        raise QuadratureError(f"contour inversion unstable: {a!r} vs {b!r}")
    return b


def log_spaced_edges(T: float, first: float = 0.1, per_decade: int = 4) -> list[float]:
    """Symmetric breakpoints 0, +-first, ..., +-T, geometric beyond `first`."""
    n = max(1, int(np.ceil(np.log10(T / first) * per_decade)))
    pos = first * (T / first) ** (np.arange(n + 1) / n)
    return sorted({0.0, *pos.tolist(), *(-pos).tolist()})


def fit_power_tail(f, T: float, *, expected: float = 2.0, rel_dev: float = 0.2,
                   samples: int = 17, floor: float = 1e-12) -> tuple[float, float]:
    """Integral of f over [T, inf) from a C s^-p fit on the last decade [T/10, T].

    Returns (tail, p).  A tail that is numerically zero contributes 0 with
    p = nan; a fitted exponent further than rel_dev from `expected` raises.
    """
    from .errors import TailFitError

    s = np.geomspace(T / 10.0, T, samples)
    vals = np.asarray(f(s), dtype=float)
    if np.max(np.abs(vals)) <= floor:
        return 0.0, float("nan")
    if np.any(vals <= 0):
        raise TailFitError("tail samples change sign or vanish on the last decade")
    slope, intercept = np.polyfit(np.log(s), np.log(vals), 1)
    p = -slope
    if abs(p - expected) > rel_dev * expected:
        raise TailFitError(f"tail exponent {p:.3f} deviates from {expected}")
    c = np.exp(intercept)
    return float(c * T ** (1.0 - p) / (p - 1.0)), float(p)
