"""Scikit-learn style front end for the whole detection pipeline."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import DegenerateGraphError
from .graph import Measure, centrality, hub_distances
from .hierarchy import build_hierarchy, suggest_cutoffs
from .propagation import membership_strength, overlap_metrics, propagate
from .roles import classify_roles
from .validation import check_graph


class OverlappingCommunityDetector(BaseEstimator):
    """Hierarchical overlapping community detection with a built-in quality score.

    Parameters
    ----------
    centrality : {"degree", "eigenvector"}, default="degree"
        Centrality used to find hubs and to orient label propagation.
    t_max : int or None, default=None
        Cap on propagation steps; ``None`` means the number of nodes.
    overlap_steps : bool, default=False
        Compute hub distances in a worker thread while labels propagate.
    eig_tol, eig_max_iter : float, int
        Power-iteration settings for eigenvector centrality.

    Attributes
    ----------
    graph_ : Graph
    centrality_ : CentralityVector
    roles_ : RoleAssignment
    propagation_ : PropagationState
    distances_ : DistanceMatrix
        Hub-to-hub hop distances (``R_0``).
    hierarchy_ : CommunityHierarchy
    metrics_ : OverlapMetrics
    hubs_ : list
        External ids of the hubs, one per end-community.
    n_communities_ : int
    phi_ : float or None
        J-D consistency factor, ``None`` when at most two hubs exist.
    cutoffs_ : CutoffSuggestions
    timings_ : dict
        Wall-clock seconds per stage.
    """

    def __init__(self, centrality="degree", t_max=None, overlap_steps=False,
                 eig_tol=1e-10, eig_max_iter=1000):
        self.centrality = centrality
        self.t_max = t_max
        self.overlap_steps = overlap_steps
        self.eig_tol = eig_tol
        self.eig_max_iter = eig_max_iter

    def fit(self, X, y=None):
        """Run role identification, propagation and aggregation on graph ``X``.

        Raises :class:`DegenerateGraphError` when no node is a hub.
        """
        g = check_graph(X)
        measure = Measure(self.centrality)
        timings = {}

        tic = time.perf_counter()
        kwargs = {} if measure is Measure.DEGREE else {"tol": self.eig_tol, "max_iter": self.eig_max_iter}
        c = centrality(g, measure, **kwargs)
        timings["centrality"] = time.perf_counter() - tic

        tic = time.perf_counter()
        roles = classify_roles(g, c)
        timings["roles"] = time.perf_counter() - tic
        if len(roles.hubs) == 0:
            raise DegenerateGraphError("no hubs found: every node ties with all of its neighbors")

        if self.overlap_steps:
            with ThreadPoolExecutor(max_workers=1) as pool:
                tic = time.perf_counter()
                fut = pool.submit(hub_distances, g, roles.hubs)
                state = propagate(g, c, roles, self.t_max)
                timings["propagation"] = time.perf_counter() - tic
                R0 = fut.result()
                timings["distances"] = time.perf_counter() - tic
        else:
            tic = time.perf_counter()
            state = propagate(g, c, roles, self.t_max)
            timings["propagation"] = time.perf_counter() - tic
            tic = time.perf_counter()
            R0 = hub_distances(g, roles.hubs)
            timings["distances"] = time.perf_counter() - tic

        tic = time.perf_counter()
        hub_labels = [g.labels[i] for i in roles.hubs]
        hierarchy = build_hierarchy(state, R0, end_names=hub_labels)
        timings["hierarchy"] = time.perf_counter() - tic

        self.graph_ = g
        self.centrality_ = c
        self.roles_ = roles
        self.propagation_ = state
        self.distances_ = R0
        self.hierarchy_ = hierarchy
        self.metrics_ = overlap_metrics(state, g)
        self.hubs_ = hub_labels
        self.n_communities_ = len(hub_labels)
        self.phi_ = hierarchy.phi
        self.cutoffs_ = suggest_cutoffs(hierarchy)
        self.timings_ = timings
        return self

    def membership_matrix(self, level=0):
        """Sparse ``(n_nodes, n_communities)`` 0/1 membership at hierarchy level ``level``.

        Level 0 gives the end-communities; higher levels give merged ones.
        """
        check_is_fitted(self, "hierarchy_")
        comms = self.hierarchy_.communities_at(level)
        rows = np.concatenate(comms) if comms else np.empty(0, dtype=np.int64)
        cols = np.repeat(np.arange(len(comms)), [len(cm) for cm in comms])
        data = np.ones(len(rows), dtype=np.int8)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.graph_.n_nodes, len(comms)))

    def _check_same_graph(self, X):
        check_is_fitted(self, "hierarchy_")
        if X is not None and check_graph(X) != self.graph_:
            raise ValueError("detection is transductive: pass the fitted graph or None")

    def transform(self, X=None, level=0):
        """Membership matrix of the fitted graph; ``X`` must be that graph or ``None``."""
        self._check_same_graph(X)
        return self.membership_matrix(level)

    def fit_transform(self, X, y=None):
        return self.fit(X).membership_matrix(0)

    def predict(self, X=None):
        """Strongest (earliest received) end-community per node, ``-1`` for none.

        Ties in arrival time go to the lower community index.
        """
        self._check_same_graph(X)
        st = self.propagation_
        out = np.full(st.n_nodes, -1, dtype=np.int64)
        order = np.lexsort((-st.comm, -st.time))  # latest first, so the earliest write wins
        out[st.node[order]] = st.comm[order]
        return out

    def membership_strength(self, node):
        """Communities of ``node`` (external id) as ``(hub id, t)``, earliest first."""
        check_is_fitted(self, "propagation_")
        i = self.graph_.index_of(node)
        return [(self.hubs_[s], t) for s, t in membership_strength(self.propagation_, i)]

    def score(self, X=None, y=None):
        """J-D consistency factor of the fitted hierarchy (NaN when not applicable)."""
        if X is not None:
            self.fit(X)
        check_is_fitted(self, "hierarchy_")
        return float("nan") if self.phi_ is None else float(self.phi_)

    @property
    def hub_fraction_(self):
        check_is_fitted(self, "roles_")
        return len(self.roles_.hubs) / self.graph_.n_nodes
