"""Streamified cellular automata for online learning on drifting streams."""

from .drift import CurieLearner, DriftMonitor, OracleAdaptiveSca, PairedLearner
from .evaluation import PrequentialTracker, RunReport, run_test_then_train
from .knn import KnnWindow
from .lattice import (
    CellLattice,
    FeatureBounds,
    GridShape,
    Neighborhood,
    NeighborhoodSpec,
)
from .sca import ScaConfig, ScaLearner, knowledge_transfer
from .streams import (
    ConceptSpec,
    DriftScenario,
    StreamSchema,
    concept_label,
    generate_stream,
    load_csv,
    scenario,
)
from .types import DriftEvent, LabeledInstance

__all__ = [
    "CellLattice",
    "ConceptSpec",
    "CurieLearner",
    "DriftEvent",
    "DriftMonitor",
    "DriftScenario",
    "FeatureBounds",
    "GridShape",
    "KnnWindow",
    "LabeledInstance",
    "Neighborhood",
    "NeighborhoodSpec",
    "OracleAdaptiveSca",
    "PairedLearner",
    "PrequentialTracker",
    "RunReport",
    "ScaConfig",
    "ScaLearner",
    "StreamSchema",
    "concept_label",
    "generate_stream",
    "knowledge_transfer",
    "load_csv",
    "run_test_then_train",
    "scenario",
]

__version__ = "0.1.0"
