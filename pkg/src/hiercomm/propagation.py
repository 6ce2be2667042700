"""Synchronous downhill label propagation from every hub."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import DegenerateGraphError
from .graph import CentralityVector, Graph
from .roles import RoleAssignment


@dataclass
class PropagationState:
    """Infection records ``(community, node, time)`` from one propagation run.

    Records are stored flat and sorted by ``(community, time, node)``;
    :attr:`X` and :attr:`H` give the per-community and per-node views.
    Community ``s`` is seeded by hub node ``hubs[s]`` at time 0.
    """

    hubs: np.ndarray
    n_nodes: int
    comm: np.ndarray
    node: np.ndarray
    time: np.ndarray
    t_fin: int
    t_max: int
    truncated: bool = False
    step_infections: list = field(default_factory=list)
    step_seconds: list = field(default_factory=list)

    @property
    def n_communities(self) -> int:
        return len(self.hubs)

    @cached_property
    def _comm_ptr(self):
        ptr = np.zeros(self.n_communities + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.comm, minlength=self.n_communities), out=ptr[1:])
        return ptr

    @cached_property
    def _hist_order(self):
        return np.lexsort((self.comm, self.time, self.node))

    @cached_property
    def _hist_ptr(self):
        ptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.node, minlength=self.n_nodes), out=ptr[1:])
        return ptr

    def community_nodes(self, s: int) -> np.ndarray:
        lo, hi = self._comm_ptr[s], self._comm_ptr[s + 1]
        return self.node[lo:hi]

    def community_sizes(self) -> np.ndarray:
        return np.diff(self._comm_ptr)

    def history_lengths(self) -> np.ndarray:
        return np.diff(self._hist_ptr)

    def community(self, s: int) -> list:
        """``x_s`` as a list of ``(node, t)`` in insertion order."""
        lo, hi = self._comm_ptr[s], self._comm_ptr[s + 1]
        return list(zip(self.node[lo:hi].tolist(), self.time[lo:hi].tolist()))

    def history(self, i: int) -> list:
        """``h_i`` as a list of ``(community, t)`` sorted by time then community."""
        idx = self._hist_order[self._hist_ptr[i]:self._hist_ptr[i + 1]]
        return list(zip(self.comm[idx].tolist(), self.time[idx].tolist()))

    @property
    def X(self) -> list:
        return [self.community(s) for s in range(self.n_communities)]

    @property
    def H(self) -> list:
        return [self.history(i) for i in range(self.n_nodes)]

    @property
    def n_multi_membership(self) -> int:
        """Nodes holding more than one community label."""
        return int(np.count_nonzero(self.history_lengths() > 1))

    def to_json(self, g: Graph | None = None) -> str:
        """Serialize ``X`` and ``H``; community keys are hub ids, nodes use ``g`` labels if given."""
        lab = (lambda i: g.labels[i]) if g is not None else (lambda i: int(i))
        comms = {str(lab(self.hubs[s])): [[lab(i), t] for i, t in self.community(s)]
                 for s in range(self.n_communities)}
        hists = {str(lab(i)): [[lab(self.hubs[s]), t] for s, t in self.history(i)]
                 for i in range(self.n_nodes)}
        return json.dumps({"communities": comms, "histories": hists})


def _expand(frontier_node, frontier_comm, indptr, indices):
    counts = indptr[frontier_node + 1] - indptr[frontier_node]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    starts = np.repeat(indptr[frontier_node] - np.cumsum(counts) + counts, counts)
    idx = starts + np.arange(total)
    return indices[idx], np.repeat(frontier_comm, counts)


def propagate(g: Graph, c: CentralityVector, roles: RoleAssignment, t_max: int | None = None) -> PropagationState:
    """Spread one label per hub along strictly decreasing centrality.

    At step ``t`` every node that joined community ``s`` at ``t - 1`` passes
    ``s`` to each neighbor with strictly lower centrality that does not yet
    hold ``s``. Stops when a full step adds nothing or at ``t_max``
    (default ``N``). ``t_fin`` is the last step with at least one infection.
    """
    n = g.n_nodes
    if t_max is None:
        t_max = n
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    hubs = np.asarray(roles.hubs, dtype=np.int64)
    k = len(hubs)

    src = np.repeat(np.arange(n), g.degree)
    down = c.greater(src, g.indices)
    d_indices = g.indices[down]
    d_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src[down], minlength=n), out=d_indptr[1:])

    f_comm = np.arange(k, dtype=np.int64)
    f_node = hubs.copy()
    visited = np.sort(f_comm * n + f_node)
    chunks_c, chunks_n, chunks_t = [f_comm], [f_node], [np.zeros(k, dtype=np.int64)]
    step_infections, step_seconds = [], []
    t0 = time.perf_counter()

    def step(f_node, f_comm):
        cand_node, cand_comm = _expand(f_node, f_comm, d_indptr, d_indices)
        keys = np.unique(cand_comm * n + cand_node)
        return keys[~np.isin(keys, visited, assume_unique=True)]

    t, t_fin, truncated = 0, 0, False
    while t < t_max:
        t += 1
        keys = step(f_node, f_comm)
        if keys.size == 0:
            break
        visited = np.union1d(visited, keys)
        f_comm, f_node = np.divmod(keys, n)
        chunks_c.append(f_comm)
        chunks_n.append(f_node)
        chunks_t.append(np.full(keys.size, t, dtype=np.int64))
        t_fin = t
        step_infections.append(int(keys.size))
        step_seconds.append(time.perf_counter() - t0)
    else:
        truncated = step(f_node, f_comm).size > 0

    comm = np.concatenate(chunks_c)
    node = np.concatenate(chunks_n)
    tt = np.concatenate(chunks_t)
    order = np.lexsort((node, tt, comm))
    return PropagationState(hubs=hubs, n_nodes=n, comm=comm[order], node=node[order],
                            time=tt[order], t_fin=t_fin, t_max=t_max, truncated=truncated,
                            step_infections=step_infections, step_seconds=step_seconds)


@dataclass(frozen=True)
class OverlapMetrics:
    m_h: float
    m_x: float
    n_memberships: int
    n_nodes: int
    n_communities: int

    def identity_holds(self) -> bool:
        # m_h * N == m_x * |S|, checked on the integer tuple counts
        return round(self.m_h * self.n_nodes) == self.n_memberships == round(self.m_x * self.n_communities)


def overlap_metrics(state: PropagationState, g: Graph | None = None) -> OverlapMetrics:
    """Average memberships per node (``m_h``) and average community size (``m_x``)."""
    if state.n_communities == 0:
        raise DegenerateGraphError("no hubs: overlap metrics are undefined")
    n = g.n_nodes if g is not None else state.n_nodes
    from_h = int(state.history_lengths().sum())
    from_x = int(state.community_sizes().sum())
    assert from_h == from_x
    return OverlapMetrics(from_h / n, from_x / state.n_communities, from_h, n, state.n_communities)


def membership_strength(state: PropagationState, node: int) -> list:
    """Labels of ``node`` ordered from strongest (earliest) to weakest."""
    if not 0 <= node < state.n_nodes:
        raise IndexError(f"node {node} out of range")
    return state.history(node)
