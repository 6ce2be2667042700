"""Parameter-free hierarchical overlapping community detection with self-falsification."""

from .estimator import OverlappingCommunityDetector
from .exceptions import (ConvergenceError, DegenerateGraphError, EdgeListParseError,
                         EmptyGraphError, HierCommError, InsufficientDataError)
from .falsify import FalsifiabilityVerdict, falsifiability_check, generate_er, match_null
from .graph import (D_INF, CentralityVector, DistanceMatrix, Graph, degree_centrality,
                    eigenvector_centrality, hub_distances, load_edge_list, write_edge_list)
from .hierarchy import (CommunityHierarchy, JaccardMatrix, build_hierarchy, jaccard,
                        jaccard_matrix, jd_consistent, phi, suggest_cutoffs)
from .propagation import PropagationState, membership_strength, overlap_metrics, propagate
from .report import DetectionReport, run_pipeline, timing_scaling_report
from .roles import Role, RoleAssignment, classify_roles
from .validation import check_graph

__version__ = "0.1.0"

__all__ = [
    "OverlappingCommunityDetector", "Graph", "CentralityVector", "DistanceMatrix", "D_INF",
    "load_edge_list", "write_edge_list", "degree_centrality", "eigenvector_centrality",
    "hub_distances", "Role", "RoleAssignment", "classify_roles", "PropagationState",
    "propagate", "overlap_metrics", "membership_strength", "CommunityHierarchy",
    "JaccardMatrix", "build_hierarchy", "jaccard", "jaccard_matrix", "jd_consistent", "phi",
    "suggest_cutoffs", "FalsifiabilityVerdict", "generate_er", "match_null",
    "falsifiability_check", "DetectionReport", "run_pipeline", "timing_scaling_report",
    "check_graph", "HierCommError", "EdgeListParseError", "EmptyGraphError",
    "DegenerateGraphError", "ConvergenceError", "InsufficientDataError",
]
