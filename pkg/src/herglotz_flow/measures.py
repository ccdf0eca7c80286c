"""Synthetic Borel measures with exact interval masses and Stieltjes transforms.

A measure is a finite sum of atoms, absolutely continuous pieces with
closed-form densities, and self-similar Cantor components.  Every quantity
here is either closed form or a convergent self-similar recursion, so the
objects double as oracles for the numerical machinery elsewhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import polynomial as P

DEFAULT_DEPTH = 60
# multipole acceptance: node half-width / distance, and number of even moments
_ACCEPT_RATIO = 0.2
_N_MOMENTS = 11  # even orders 0, 2, ..., 20


# --------------------------------------------------------------------------
# density tags


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if not self.c >= 0:
            raise ValueError("constant density must be nonnegative")


@dataclass(frozen=True)
class Polynomial:
    """Density sum(coeffs[k] * lam**k) in absolute coordinates."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("polynomial density needs at least one coefficient")


@dataclass(frozen=True)
class FatCantorIndicator:
    """Indicator of the removed gaps of a fat Cantor set, mapped onto the piece.

    Level n deletes a centred gap of length 2*r*4**-(n+1) (unit coordinates)
    from each of the 2**n retained intervals, so the gaps total r.
    """

    removed_total: float

    def __post_init__(self):
        if not 0.0 < self.removed_total < 1.0:
            raise ValueError("removed_total must lie in (0, 1)")


# --------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class Atom:
    position: float
    weight: float

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError("atom weight must be positive")


@dataclass(frozen=True)
class AcPiece:
    lo: float
    hi: float
    density: Constant | Polynomial | FatCantorIndicator

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("ac piece needs lo < hi")
        if isinstance(self.density, Polynomial):
            grid = np.linspace(self.lo, self.hi, 2001)
            if P.polyval(grid, self.density.coeffs).min() < -1e-12:
                raise ValueError("polynomial density is negative on its interval")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def density_at(self, lam):
        lam = np.asarray(lam, dtype=float)
        inside = (lam > self.lo) & (lam < self.hi)
        d = self.density
        if isinstance(d, Constant):
            vals = np.full(lam.shape, d.c)
        elif isinstance(d, Polynomial):
            vals = P.polyval(lam, d.coeffs)
        else:
            u = (lam - self.lo) / self.length
            vals = _fat_tree(d.removed_total).in_gap(u).astype(float)
        return np.where(inside, vals, 0.0)

    def mass_between(self, a: float, b: float) -> float:
        a, b = max(a, self.lo), min(b, self.hi)
        if a >= b:
            return 0.0
        d = self.density
        if isinstance(d, Constant):
            return d.c * (b - a)
        if isinstance(d, Polynomial):
            anti = P.polyint(d.coeffs)
            return float(P.polyval(b, anti) - P.polyval(a, anti))
        tree = _fat_tree(d.removed_total)
        ua, ub = (a - self.lo) / self.length, (b - self.lo) / self.length
        return self.length * (tree.removed_below(ub) - tree.removed_below(ua))

    @property
    def mass(self) -> float:
        return self.mass_between(self.lo, self.hi)

    def stieltjes(self, z: np.ndarray) -> np.ndarray:
        d = self.density
        if isinstance(d, Constant):
            return d.c * _log_ratio(self.lo, self.hi, z)
        if isinstance(d, Polynomial):
            # I_k = int s^k/(s-z) ds obeys I_k = z I_{k-1} + (hi^k - lo^k)/k
            ik = _log_ratio(self.lo, self.hi, z)
            out = d.coeffs[0] * ik
            for k in range(1, len(d.coeffs)):
                ik = z * ik + (self.hi**k - self.lo**k) / k
                out = out + d.coeffs[k] * ik
            return out
        zeta = (z - self.lo) / self.length
        return _fat_tree(d.removed_total).stieltjes(zeta)


@dataclass(frozen=True)
class CantorComponent:
    lo: float
    hi: float
    weight: float = 1.0
    ratio: float = 1.0 / 3.0
    depth: int = DEFAULT_DEPTH

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("Cantor support needs lo < hi")
        if not self.weight > 0:
            raise ValueError("Cantor weight must be positive")
        if not 0.0 < self.ratio < 0.5:
            raise ValueError("contraction ratio must lie in (0, 1/2)")
        if self.depth < 1:
            raise ValueError("depth cap must be positive")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def cdf(self, x):
        """Mass of (-inf, x]; error at most weight * 2**-depth."""
        u = (np.asarray(x, dtype=float) - self.lo) / self.length
        return self.weight * _cantor_unit_cdf(u, self.ratio, self.depth)

    def mass_between(self, a: float, b: float) -> float:
        # the measure is continuous, so open/closed endpoints agree
        return float(self.cdf(b) - self.cdf(a))

    def stieltjes(self, z: np.ndarray) -> np.ndarray:
        zeta = (z - self.lo) / self.length
        tree = _cantor_tree(self.ratio, self.depth)
        return (self.weight / self.length) * tree.stieltjes(zeta)


# --------------------------------------------------------------------------
# the measure


@dataclass(frozen=True)
class MeasureSpec:
    atoms: tuple[Atom, ...] = ()
    ac: tuple[AcPiece, ...] = ()
    cantor: tuple[CantorComponent, ...] = ()

    def __post_init__(self):
        for name in ("atoms", "ac", "cantor"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not np.isfinite(weight_integral(self)):
            raise ValueError("measure is not Poisson-integrable")

    @property
    def is_zero(self) -> bool:
        return not (self.atoms or self.ac or self.cantor)

    @property
    def total_mass(self) -> float:
        return (sum(a.weight for a in self.atoms) + sum(p.mass for p in self.ac)
                + sum(c.weight for c in self.cantor))

    def stieltjes(self, z) -> np.ndarray:
        """S(z) = int dmu(s)/(s - z), vectorised over z."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for a in self.atoms:
            out += a.weight / (a.position - z)
        for p in self.ac:
            out += p.stieltjes(z)
        for c in self.cantor:
            out += c.stieltjes(z)
        return out

    def scaled(self, factor: float) -> "MeasureSpec":
        return MeasureSpec(
            tuple(Atom(a.position, factor * a.weight) for a in self.atoms),
            tuple(AcPiece(p.lo, p.hi, _scale_density(p.density, factor)) for p in self.ac),
            tuple(CantorComponent(c.lo, c.hi, factor * c.weight, c.ratio, c.depth)
                  for c in self.cantor),
        )

    # ---- JSON ----

    def to_json(self) -> dict:
        return {
            "atoms": [{"pos": a.position, "w": a.weight} for a in self.atoms],
            "ac": [{"lo": p.lo, "hi": p.hi, "density": _density_to_json(p.density)}
                   for p in self.ac],
            "cantor": [{"lo": c.lo, "hi": c.hi, "w": c.weight, "ratio": c.ratio,
                        "depth": c.depth} for c in self.cantor],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MeasureSpec":
        return cls(
            tuple(Atom(float(a["pos"]), float(a["w"])) for a in doc.get("atoms", [])),
            tuple(AcPiece(float(p["lo"]), float(p["hi"]), _density_from_json(p["density"]))
                  for p in doc.get("ac", [])),
            tuple(CantorComponent(float(c["lo"]), float(c["hi"]), float(c.get("w", 1.0)),
                                  float(c.get("ratio", 1.0 / 3.0)),
                                  int(c.get("depth", DEFAULT_DEPTH)))
                  for c in doc.get("cantor", [])),
        )


def _scale_density(d, factor):
    if isinstance(d, Constant):
        return Constant(factor * d.c)
    if isinstance(d, Polynomial):
        return Polynomial(tuple(factor * c for c in d.coeffs))
    if factor == 1.0:
        return d
    raise ValueError("fat-Cantor indicators cannot be rescaled")


def _density_to_json(d) -> dict:
    if isinstance(d, Constant):
        return {"kind": "constant", "c": d.c}
    if isinstance(d, Polynomial):
        return {"kind": "polynomial", "coeffs": list(d.coeffs)}
    return {"kind": "fat_cantor", "removed_total": d.removed_total}


def _density_from_json(doc: dict):
    kind = doc["kind"]
    if kind == "constant":
        return Constant(float(doc["c"]))
    if kind == "polynomial":
        return Polynomial(tuple(doc["coeffs"]))
    if kind == "fat_cantor":
        return FatCantorIndicator(float(doc["removed_total"]))
    raise ValueError(f"unknown density kind {kind!r}")


def weight_integral(mu: MeasureSpec) -> float:
    """int dmu/(1 + lam^2), which is Im of the Stieltjes transform at i."""
    total = sum(a.weight / (1.0 + a.position**2) for a in mu.atoms)
    for part in (*mu.ac, *mu.cantor):
        total += float(part.stieltjes(np.array([1j]))[0].imag)
    return total


def measure_of_interval(mu: MeasureSpec, lo: float, hi: float,
                        convention: str = "open") -> float:
    if not lo < hi:
        raise ValueError("need lo < hi")
    if convention not in ("open", "half_atom"):
        raise ValueError(f"unknown convention {convention!r}")
    total = 0.0
    for a in mu.atoms:
        if lo < a.position < hi:
            total += a.weight
        elif convention == "half_atom" and a.position in (lo, hi):
            total += 0.5 * a.weight
    for part in (*mu.ac, *mu.cantor):
        total += part.mass_between(lo, hi)
    return total


def atom_weight_at(mu: MeasureSpec, lam: float) -> float:
    return sum(a.weight for a in mu.atoms if a.position == lam)


def cantor_cdf(c: CantorComponent, x):
    return c.cdf(x)


def fat_cantor_density(removed_total: float, lo: float = 0.0, hi: float = 1.0) -> AcPiece:
    return AcPiece(lo, hi, FatCantorIndicator(removed_total))


def uniform(lo: float = 0.0, hi: float = 1.0, c: float = 1.0) -> AcPiece:
    return AcPiece(lo, hi, Constant(c))


# --------------------------------------------------------------------------
# Cantor CDF


def _exact_ratio(r: float) -> Fraction:
    simple = Fraction(r).limit_denominator(1000)
    return simple if abs(float(simple) - r) <= 1e-15 else Fraction(r)


def _cantor_unit_cdf_scalar(u: float, r: Fraction, depth: int) -> float:
    # exact rational descent: float descent amplifies rounding by 1/r per level
    x = Fraction(u)
    acc, scale = Fraction(0), Fraction(1)
    for _ in range(depth):
        if x <= 0:
            return float(acc)
        if x >= 1:
            return float(acc + scale)
        scale /= 2
        if x < r:
            x = x / r
        elif x > 1 - r:
            acc += scale
            x = (x - (1 - r)) / r
        else:
            return float(acc + scale)
    return float(acc + scale * min(max(x, Fraction(0)), Fraction(1)))


def _cantor_unit_cdf(u, r: float, depth: int):
    rq = _exact_ratio(r)
    u = np.asarray(u, dtype=float)
    flat = [_cantor_unit_cdf_scalar(float(v), rq, depth) for v in u.ravel()]
    return np.array(flat).reshape(u.shape)


# --------------------------------------------------------------------------
# multipole trees for self-similar components (unit coordinates)


@dataclass(frozen=True)
class _SelfSimilarTree:
    """Binary tree of nested intervals centred at 1/2.

    Level-n nodes share half-width, child offset, even central moments and an
    optional centred gap carrying density 1 (fat Cantor only).
    """

    half: np.ndarray        # node half-width per level
    offset: np.ndarray      # child centre offset per level
    gap_half: np.ndarray    # half-length of the exact gap per level (0 if none)
    moments: np.ndarray     # (levels, _N_MOMENTS) even central moments
    removed: float = 0.0    # total removed length (fat Cantor)
    ratio: float = 0.0      # Cantor contraction ratio

    @property
    def depth(self) -> int:
        return len(self.half) - 1

    def stieltjes(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        shape = zeta.shape
        zeta = zeta.ravel()
        re_out = np.zeros(zeta.size)
        im_out = np.zeros(zeta.size)
        centre = np.full(zeta.size, 0.5)
        zid = np.arange(zeta.size)
        for level in range(self.depth + 1):
            if zid.size == 0:
                break
            w = 1.0 / (centre - zeta[zid])
            h = self.half[level]
            far = h * np.abs(w) <= _ACCEPT_RATIO
            if level == self.depth:
                far[:] = True
            if far.any():
                wf = w[far]
                series = wf * P.polyval(wf * wf, self.moments[level])
                re_out += np.bincount(zid[far], series.real, zeta.size)
                im_out += np.bincount(zid[far], series.imag, zeta.size)
            near = ~far
            if not near.any():
                break
            cz, iz = centre[near], zid[near]
            g = self.gap_half[level]
            if g > 0:
                exact = np.log1p(2.0 * g / (cz - g - zeta[iz]))
                re_out += np.bincount(iz, exact.real, zeta.size)
                im_out += np.bincount(iz, exact.imag, zeta.size)
            off = self.offset[level]
            centre = np.concatenate([cz - off, cz + off])
            zid = np.concatenate([iz, iz])
        return (re_out + 1j * im_out).reshape(shape)

    def in_gap(self, u) -> np.ndarray:
        """Membership in the union of removed gaps (fat Cantor)."""
        u = np.asarray(u, dtype=float)
        x = np.abs(u - 0.5)
        hit = np.zeros(u.shape, dtype=bool)
        alive = (u > 0.0) & (u < 1.0)
        for level in range(self.depth):
            hit |= alive & (x < self.gap_half[level])
            alive &= ~hit
            x = np.abs(x - self.offset[level])
        return hit

    def removed_below(self, u: float) -> float:
        """Lebesgue measure of the removed gaps inside [0, u] (unit coords)."""
        u = min(max(u, 0.0), 1.0)
        total, lo = 0.0, 0.0
        for level in range(self.depth):
            c = lo + self.half[level]
            g = self.gap_half[level]
            child_removed = self.removed * 4.0 ** -(level + 1)
            if u >= c + g:
                total += child_removed + 2.0 * g
                lo = c + g
            elif u > c - g:
                return total + child_removed + (u - (c - g))
            if u <= lo:
                break
        return total


def _even_central_moments_recursion(levels, half, offset, gap_half, leaf_mass):
    """Bottom-up even central moments: children at +-offset plus a centred gap."""
    mom = np.zeros((levels + 1, _N_MOMENTS))
    mom[levels, 0] = leaf_mass[levels]
    for n in range(levels - 1, -1, -1):
        for j in range(_N_MOMENTS):
            k = 2 * j
            val = 2.0 * gap_half[n] ** (k + 1) / (k + 1)
            for i in range(j + 1):
                val += 2.0 * comb(k, 2 * i) * mom[n + 1, i] * offset[n] ** (k - 2 * i)
            mom[n, j] = val
    return mom


@lru_cache(maxsize=None)
def _cantor_tree(r: float, depth: int) -> _SelfSimilarTree:
    half = 0.5 * r ** np.arange(depth + 1)
    return _SelfSimilarTree(half, half * (1.0 - r), np.zeros(depth + 1),
                            _cantor_moments(r, depth), ratio=r)


def _cantor_moments(r: float, depth: int) -> np.ndarray:
    """Even central moments of a level-n Cantor node (mass 2**-n, half-width r**n/2).

    For the unit Cantor measure centred at 0 with half-width 1/2, the moments
    satisfy m_k (1 - r^k) = 1/2 sum_{j<k} C(k,j) r^j m_j s^(k-j) (1 + (-1)^(k-j))
    with s = (1 - r)/2; level-n moments follow by scaling.
    """
    s = (1.0 - r) / 2.0
    kmax = 2 * (_N_MOMENTS - 1)
    m = np.zeros(kmax + 1)
    m[0] = 1.0
    for k in range(1, kmax + 1):
        if k % 2:
            continue
        acc = 0.0
        for j in range(0, k, 2):
            acc += comb(k, j) * r**j * m[j] * s ** (k - j)
        m[k] = acc / (1.0 - r**k)
    out = np.zeros((depth + 1, _N_MOMENTS))
    for n in range(depth + 1):
        scale = r**n
        out[n] = 0.5**n * m[0::2] * scale ** np.arange(0, kmax + 1, 2)
    return out


@lru_cache(maxsize=None)
def _fat_tree(removed: float, depth: int = DEFAULT_DEPTH) -> _SelfSimilarTree:
    n = np.arange(depth + 1, dtype=float)
    length = (1.0 - removed + removed * 2.0**-n) / 2.0**n
    gap = removed * 2.0 ** (-2 * n - 1)
    offset = np.zeros(depth + 1)
    offset[:-1] = (gap[:-1] + length[1:]) / 2.0
    gap_half = gap / 2.0
    gap_half[-1] = 0.0
    half = length / 2.0
    mom = _even_central_moments_recursion(depth, half, offset, gap_half, removed * 4.0**-n)
    return _SelfSimilarTree(half, offset, gap_half, mom, removed=removed)


def _log_ratio(lo: float, hi: float, z) -> np.ndarray:
    """log((hi - z)/(lo - z)) written to stay accurate far from [lo, hi]."""
    z = np.asarray(z, dtype=complex)
    return np.log1p((hi - lo) / (lo - z))


# --------------------------------------------------------------------------
# fat Cantor helpers


def fat_cantor_gaps(removed: float, levels: int) -> list[tuple[float, float]]:
    """Removed open gaps of the first `levels` levels, in unit coordinates."""
    tree = _fat_tree(removed)
    gaps = []
    centres = [0.5]
    for level in range(levels):
        g = tree.gap_half[level]
        gaps.extend((c - g, c + g) for c in centres)
        off = tree.offset[level]
        centres = [c + s * off for c in centres for s in (-1.0, 1.0)]
    return sorted(gaps)


def fat_cantor_k_point(removed: float, path: str) -> float:
    """Point of K reached by following a left/right path through retained nodes.

    The path is extended by an alternating tail so the point sits away from
    every gap edge at all resolved scales.
    """
    tree = _fat_tree(removed)
    if set(path) - {"L", "R"}:
        raise ValueError("path must consist of 'L' and 'R'")
    # a bare path ends on a node centre, which is the centre of its next gap
    full = (path + "LR" * tree.depth)[: tree.depth]
    c = 0.5
    for level, step in enumerate(full):
        c += tree.offset[level] * (1.0 if step == "R" else -1.0)
    return c
