"""Finite diagonal-plus-rank-one models: exact oracles for the flow machinery.

A = diag(eigenvalues), P = phi phi^T with a unit cyclic vector phi.  The
family A_t = A + tP has M-function M_t = M/(tM + 1); its spectrum is
available twice, from the secular equation and from a dense eigensolver,
and the two routes must agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .herglotz import HerglotzRep
from .measures import Atom, MeasureSpec
from .quadrature import adaptive_gl, fit_power_tail, log_spaced_edges

MAX_LEVELS = 64
EIG_TOL = 1e-10
WEIGHT_TOL = 1e-8
COUPLING_FLOOR = 1e-280


@dataclass(frozen=True)
class FiniteModel:
    eigenvalues: tuple[float, ...]
    vector: tuple[float, ...]

    def __post_init__(self):
        eig = np.asarray(self.eigenvalues, dtype=float)
        phi = np.asarray(self.vector, dtype=float)
        object.__setattr__(self, "eigenvalues", tuple(eig.tolist()))
        object.__setattr__(self, "vector", tuple(phi.tolist()))
        if eig.ndim != 1 or eig.shape != phi.shape or eig.size == 0:
            raise ValueError("eigenvalues and vector must be equal-length sequences")
        if eig.size > MAX_LEVELS:
            raise ValueError(f"models are capped at {MAX_LEVELS} levels")
        if np.any(np.diff(eig) <= 0):
            raise ValueError("eigenvalues must be strictly increasing")
        if abs(np.dot(phi, phi) - 1.0) > 1e-12:
            raise ValueError("vector must have unit norm")
        if np.any(phi == 0):
            raise ValueError("vector must be cyclic (no zero components)")

    @classmethod
    def normalized(cls, eigenvalues, vector) -> "FiniteModel":
        phi = np.asarray(vector, dtype=float)
        return cls(tuple(eigenvalues), tuple(phi / np.linalg.norm(phi)))

    @property
    def eig(self) -> np.ndarray:
        return np.asarray(self.eigenvalues)

    @property
    def phi(self) -> np.ndarray:
        return np.asarray(self.vector)

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    def matrix(self, t: float = 0.0) -> np.ndarray:
        return np.diag(self.eig) + t * np.outer(self.phi, self.phi)

    def __call__(self, z):
        return m_function(self, z)

    def derivative(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.sum(self.phi**2 / (self.eig - lam[..., None]) ** 2, axis=-1)

    def as_herglotz(self) -> HerglotzRep:
        atoms = tuple(Atom(l, p * p) for l, p in zip(self.eigenvalues, self.vector))
        b = float(np.sum(self.phi**2 * self.eig / (1 + self.eig**2)))
        return HerglotzRep(0.0, b, MeasureSpec(atoms=atoms))

    def to_json(self) -> dict:
        return {"eigs": list(self.eigenvalues), "phi": list(self.vector)}

    @classmethod
    def from_json(cls, doc: dict) -> "FiniteModel":
        return cls.normalized(doc["eigs"], doc["phi"])


def m_function(model: FiniteModel, z):
    z = np.asarray(z, dtype=complex)
    diff = model.eig - z[..., None]
    if np.any(diff == 0):
        raise DomainError("M is singular at an eigenvalue")
    return np.sum(model.phi**2 / diff, axis=-1)


@dataclass(frozen=True)
class PerturbedSpectrum:
    t: float
    eigenvalues: np.ndarray
    weights: np.ndarray


def _secular_roots(model: FiniteModel, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Roots of 1 + t M(x) = 0 and the matrix eig_j - root_i.

    Each root is found as an offset u from the pole it leaves (the lower
    pole for t > 0, the upper one for t < 0), so roots that float cannot
    separate from an eigenvalue still get exact differences.
    """
    eig, phi2 = model.eig, model.phi**2
    reach = abs(t) * float(phi2.sum()) + 1.0
    if t > 0:
        spans, direction = np.append(np.diff(eig), reach), 1.0
    else:
        spans, direction = np.insert(np.diff(eig), 0, reach), -1.0
    roots, diffs = [], []
    for anchor, span in zip(eig, spans):
        rel = eig - anchor
        g = lambda u: 1.0 + t * float(np.sum(phi2 / (rel - direction * u)))
        hi = span * (1.0 - 1e-13) if span != reach else span
        lo = 1e-13 * max(1.0, abs(anchor))
        while g(lo) * g(hi) > 0 and lo > 1e-300:
            lo *= 1e-8
        # locate in log u (roots may sit hundreds of decades below the span),
        # then polish on a narrow linear bracket
        s = brentq(lambda v: g(math.exp(v)), math.log(lo), math.log(hi), xtol=1e-12, maxiter=500)
        a, b = max(lo, math.exp(s) * (1 - 1e-9)), min(hi, math.exp(s) * (1 + 1e-9))
        u = brentq(g, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps) if g(a) * g(b) < 0 else math.exp(s)
        roots.append(anchor + direction * u)
        diffs.append(rel - direction * u)
    return np.array(roots), np.array(diffs)


def perturbed_spectrum(model: FiniteModel, t: float) -> PerturbedSpectrum:
    if abs(t) < COUPLING_FLOOR:
        # eigenvalues move by at most |t|, far below any representable offset
        return PerturbedSpectrum(float(t), model.eig.copy(), model.phi**2)
    roots, diffs = _secular_roots(model, t)
    # (diff/t)**2 rather than t*t*diff**2, which underflows for tiny couplings
    with np.errstate(over="ignore"):
        weights = 1.0 / np.sum(model.phi**2 / (diffs / t) ** 2, axis=1)
    dense_vals, dense_vecs = np.linalg.eigh(model.matrix(t))
    dense_w = (dense_vecs.T @ model.phi) ** 2
    if np.max(np.abs(dense_vals - roots)) > EIG_TOL * max(1.0, np.max(np.abs(roots))):
        raise RuntimeError("secular and dense eigenvalues disagree")
    if np.max(np.abs(dense_w - weights)) > WEIGHT_TOL:
        raise RuntimeError("secular and dense weights disagree")
    return PerturbedSpectrum(float(t), roots, weights)


def spectra_dense(model: FiniteModel, ts) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and weights of A + tP for a batch of t (dense route)."""
    ts = np.asarray(ts, dtype=float)
    mats = np.diag(model.eig)[None] + ts[:, None, None] * np.outer(model.phi, model.phi)[None]
    vals, vecs = np.linalg.eigh(mats)
    weights = np.einsum("kij,i->kj", vecs, model.phi) ** 2
    return vals, weights


def counting(eigs, lam) -> np.ndarray:
    """Number of eigenvalues <= lam."""
    return np.searchsorted(np.sort(eigs), np.asarray(lam, dtype=float), side="right")


def spectral_shift_counting(model: FiniteModel, t: float, lam) -> np.ndarray | float:
    """N_A(lam) - N_{A_t}(lam); nonnegative for t > 0."""
    shifted = perturbed_spectrum(model, t).eigenvalues
    out = counting(model.eig, lam) - counting(shifted, lam)
    return out if np.ndim(lam) else int(out)


def _integrated_counting(eigs, lo: float, hi: float) -> float:
    """int_lo^hi N(lam) dlam for a counting function with jumps at eigs."""
    return float(sum(max(0.0, hi - max(lo, e)) for e in eigs))


def crossing_times(model: FiniteModel, points) -> list[float]:
    """t at which an eigenvalue of A_t sits at one of the points: t = -1/M(p)."""
    out = []
    for p in points:
        if np.any(model.eig == p):
            out.append(0.0)
            continue
        m = float(m_function(model, p).real)
        if m != 0:
            out.append(-1.0 / m)
    return out


def interval_mass(model: FiniteModel, lo: float, hi: float, ts) -> np.ndarray:
    vals, weights = spectra_dense(model, ts)
    return np.sum(np.where((vals > lo) & (vals < hi), weights, 0.0), axis=-1)


def birman_solomyak_check(model: FiniteModel, interval, t1: float, t2: float, *,
                          tol: float = 1e-12) -> tuple[float, float, float]:
    lo, hi = interval
    if t1 > t2:
        raise ValueError("need t1 <= t2")
    if t1 == t2:
        return 0.0, 0.0, 0.0
    lhs = adaptive_gl(lambda ts: interval_mass(model, lo, hi, ts), t1, t2,
                      breakpoints=crossing_times(model, (lo, hi)), tol=tol)
    e1 = perturbed_spectrum(model, t1).eigenvalues
    e2 = perturbed_spectrum(model, t2).eigenvalues
    rhs = _integrated_counting(e1, lo, hi) - _integrated_counting(e2, lo, hi)
    return lhs, rhs, abs(lhs - rhs)


@dataclass(frozen=True)
class UniversalityResult:
    value: float
    core: float
    tail: float
    tail_exponent: float
    budget: float


def universality_check(model: FiniteModel, interval, T_cut: float = 1e4) -> UniversalityResult:
    """int_R mu_t(interval) dt: quadrature on [-T, T] plus fitted C|t|^-p tails."""
    lo, hi = interval
    if hi <= lo:
        return UniversalityResult(0.0, 0.0, 0.0, float("nan"), 0.0)
    mass = lambda ts: interval_mass(model, lo, hi, ts)
    edges = log_spaced_edges(T_cut)
    cuts = sorted(set(edges) | {c for c in crossing_times(model, (lo, hi)) if abs(c) < T_cut})
    core = adaptive_gl(mass, -T_cut, T_cut, breakpoints=cuts, tol=1e-9)
    tail, p_left, p_right = 0.0, float("nan"), float("nan")
    for sign in (-1.0, 1.0):
        value, p = fit_power_tail(lambda s: mass(sign * s), T_cut)
        tail += value
        if sign < 0:
            p_left = p
        else:
            p_right = p
    exponents = [p for p in (p_left, p_right) if math.isfinite(p)]
    p = float(np.mean(exponents)) if exponents else float("nan")
    return UniversalityResult(core + tail, core, tail, p, budget=max(abs(tail) * 0.05, 1e-9))


def resolvent_identity_check(model: FiniteModel, t: float, z: complex) -> float:
    """Max-entry residual of the rank-one resolvent formula at (t, z)."""
    if not complex(z).imag > 0:
        raise DomainError("need Im z > 0")
    n = model.size
    r0 = np.diag(1.0 / (model.eig - z))
    lhs = np.linalg.inv(model.matrix(t) - z * np.eye(n))
    m = complex(m_function(model, z))
    rphi = r0 @ model.phi
    # t/(tM + 1) avoids the 1/t of the textbook form, so t = 0 is covered
    rhs = r0 - (t / (t * m + 1.0)) * np.outer(rphi, rphi)
    return float(np.max(np.abs(lhs - rhs)))


def n_function(model: FiniteModel, z):
    """phi^T (zA + 1)(A - z)^{-1} phi."""
    z = np.asarray(z, dtype=complex)
    return np.sum(model.phi**2 * (z[..., None] * model.eig + 1) / (model.eig - z[..., None]), axis=-1)


def krein_transform(t: float, w):
    """f_t(w) = (w - t)/(t w + 1)."""
    return (w - t) / (t * np.asarray(w) + 1)
