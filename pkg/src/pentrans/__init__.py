"""Persistent-entropy tools for detecting topological transitions in simulations."""

from .diagram import (
    Bar,
    DiagramError,
    PersistenceDiagram,
    finitize,
    normalized_persistent_entropy,
    persistent_entropy,
    read_diagrams,
    truncate_lifetimes,
    write_diagrams,
)
from .metrics import bottleneck, bottleneck_matching
from .rips import distance_matrix_from_points, h0_single_linkage, vr_persistence
from .stability import estimate_critical, stability_probability, transition_time
from .sweep import Detector, KuramotoSweep, VicsekSweep, run_sweep, write_sweep

__version__ = "0.1.0"
