"""Moebius flows of Herglotz functions, spectral shift densities and spectral averaging."""

from .herglotz import ConstantHerglotz, EpsSchedule, HerglotzRep
from .measures import Atom, AcPiece, CantorComponent, MeasureSpec
from .rankone import FiniteModel
from .sl2 import BOOST, ROTATION, UNIPOTENT, CaseTag, GroupElement, LieElement

__all__ = [
    "AcPiece", "Atom", "BOOST", "CantorComponent", "CaseTag", "ConstantHerglotz", "EpsSchedule",
    "FiniteModel", "GroupElement", "HerglotzRep", "LieElement", "MeasureSpec", "ROTATION",
    "UNIPOTENT",
]

__version__ = "0.1.0"
