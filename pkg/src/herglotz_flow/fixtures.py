"""Named starting functions with known answers."""
from __future__ import annotations

import math

import numpy as np

from .averaging import InvariantSets
from .herglotz import ConstantHerglotz, HerglotzRep
from .measures import Atom, CantorComponent, MeasureSpec, fat_cantor_density, uniform
from .rankone import FiniteModel


def plain_transform(mu: MeasureSpec) -> HerglotzRep:
    """M(z) = int dmu/(lam - z), i.e. B chosen to cancel the normalising shift."""
    shift = 0.0 if mu.is_zero else float(mu.stieltjes(np.array([1j]))[0].real)
    return HerglotzRep(0.0, shift, mu)


def scalar_delta0() -> HerglotzRep:
    """M = -1/z."""
    return plain_transform(MeasureSpec(atoms=(Atom(0.0, 1.0),)))


def two_level() -> FiniteModel:
    """A = diag(-1, 1), phi = (1, 1)/sqrt 2; M = z/(1 - z^2)."""
    return FiniteModel.normalized((-1.0, 1.0), (1.0, 1.0))


def constant_i() -> ConstantHerglotz:
    return ConstantHerglotz(1j)


def identity_z() -> HerglotzRep:
    return HerglotzRep(1.0, 0.0, MeasureSpec())


def uniform01() -> HerglotzRep:
    return plain_transform(MeasureSpec(ac=(uniform(0.0, 1.0, 1.0),)))


def cantor() -> HerglotzRep:
    return plain_transform(MeasureSpec(cantor=(CantorComponent(0.0, 1.0),)))


def delta2() -> HerglotzRep:
    """Uniform [0, 1] plus an atom of mass 0.3 at 2."""
    return plain_transform(MeasureSpec(atoms=(Atom(2.0, 0.3),), ac=(uniform(0.0, 1.0, 1.0),)))


def uniform_plus_atom() -> HerglotzRep:
    """Uniform [0, 1] plus a unit atom at 2."""
    return plain_transform(MeasureSpec(atoms=(Atom(2.0, 1.0),), ac=(uniform(0.0, 1.0, 1.0),)))


def mixed() -> HerglotzRep:
    """Uniform [0, 1], an atom of mass 0.3 at 2 and a Cantor measure on [3, 4]."""
    return plain_transform(MeasureSpec(atoms=(Atom(2.0, 0.3),), ac=(uniform(0.0, 1.0, 1.0),),
                                       cantor=(CantorComponent(3.0, 4.0),)))


def fat_cantor(removed_total: float = 0.5) -> HerglotzRep:
    return plain_transform(MeasureSpec(ac=(fat_cantor_density(removed_total),)))


INF = math.inf

DECLARED_SETS = {
    "constant_i": InvariantSets(ac=((-INF, INF),)),
    "identity_z": InvariantSets(pp=((-INF, INF),)),
    "uniform_plus_atom": InvariantSets(ac=((0.0, 1.0),), pp=((-INF, 0.0), (1.0, INF)),
                                       points=(0.0, 1.0, 2.0)),
    "scalar_delta0": InvariantSets(pp=((-INF, INF),)),
}

# 30 labelled points of the mixed fixture, away from component edges
MIXED_LABELS: tuple[tuple[float, str], ...] = (
    *((lam, "ac") for lam in (0.05, 0.1, 0.25, 0.33, 0.42, 0.5, 0.61, 0.7, 0.9, 0.95)),
    *((lam, "pp") for lam in (-1.0, -0.5, 1.2, 1.5, 2.0, 2.5, 3.2, 3.5, 3.8, 5.0)),
    *((lam, "sc") for lam in (3.0 + 1 / 4, 3.0 + 3 / 4, 3.1, 3.0 + 1 / 3, 3.0 + 2 / 3,
                              3.0 + 1 / 9, 3.0 + 1 / 36, 3.9, 3.0 + 1 / 12, 3.0 + 3 / 10)),
)


def atom_fixtures() -> list[tuple[str, HerglotzRep, float, float]]:
    """(name, M, atom position, atom mass): ten cases with other spectrum nearby."""
    cases = [
        ("delta0", MeasureSpec(atoms=(Atom(0.0, 1.0),)), 0.0, 1.0),
        ("two_level_minus", two_level().as_herglotz().mu, -1.0, 0.5),
        ("two_level_plus", two_level().as_herglotz().mu, 1.0, 0.5),
        ("delta2", delta2().mu, 2.0, 0.3),
        ("atom_in_ac", MeasureSpec(atoms=(Atom(0.5, 0.2),), ac=(uniform(0.0, 1.0, 1.0),)), 0.5, 0.2),
        ("atom_at_edge", MeasureSpec(atoms=(Atom(1.0, 0.7),), ac=(uniform(0.0, 1.0, 2.0),)), 1.0, 0.7),
        ("cluster", MeasureSpec(atoms=(Atom(-0.1, 0.25), Atom(0.0, 0.5), Atom(0.1, 0.25))), 0.0, 0.5),
        ("heavy", MeasureSpec(atoms=(Atom(-3.0, 40.0), Atom(4.0, 1.0))), -3.0, 40.0),
        ("light", MeasureSpec(atoms=(Atom(0.3, 1e-3),), ac=(uniform(-1.0, 1.0, 0.5),)), 0.3, 1e-3),
        ("near_cantor", mixed().mu, 2.0, 0.3),
    ]
    return [(name, plain_transform(mu), pos, w) for name, mu, pos, w in cases]


def random_model(rng: np.random.Generator, size: int | None = None) -> FiniteModel:
    """Levels 2..6 spread over [-3, 3] with a random cyclic vector."""
    n = int(rng.integers(2, 7)) if size is None else size
    eigs = np.sort(rng.uniform(-3.0, 3.0, size=n))
    while np.any(np.diff(eigs) < 0.05):
        eigs = np.sort(rng.uniform(-3.0, 3.0, size=n))
    phi = rng.uniform(0.2, 1.0, size=n) * rng.choice((-1.0, 1.0), size=n)
    return FiniteModel.normalized(eigs, phi)


FIXTURES = {
    "scalar_delta0": scalar_delta0,
    "two_level": two_level,
    "constant_i": constant_i,
    "identity_z": identity_z,
    "uniform01": uniform01,
    "cantor": cantor,
    "delta2": delta2,
    "uniform_plus_atom": uniform_plus_atom,
    "mixed": mixed,
    "fat_cantor": fat_cantor,
}
