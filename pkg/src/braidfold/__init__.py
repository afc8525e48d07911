"""Folding automata and certified search for minimum-dilatation braids."""

__version__ = "0.1.0"

from .tracks import Polygon, StratumSpec, TrainTrack, NAMED_STRATA
from .matrices import TransMatrix
from .automaton import FoldArrow, FoldingAutomaton, build_automaton

__all__ = [
    "Polygon",
    "StratumSpec",
    "TrainTrack",
    "NAMED_STRATA",
    "TransMatrix",
    "FoldArrow",
    "FoldingAutomaton",
    "build_automaton",
    "__version__",
]
