"""Input coercion so the estimator accepts the usual graph containers."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graph import Graph, load_edge_list


def _from_adjacency(a) -> Graph:
    a = sp.csr_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {a.shape}")
    if (a != a.T).nnz:
        raise ValueError("adjacency matrix must be symmetric (undirected graph)")
    coo = sp.triu(a, k=0).tocoo()
    keep = coo.data != 0
    return Graph.from_edges(zip(coo.row[keep].tolist(), coo.col[keep].tolist()))


def check_graph(X) -> Graph:
    """Coerce ``X`` into a cleaned :class:`Graph`.

    Accepted inputs:

    - a :class:`Graph` (returned unchanged)
    - a networkx graph (must be undirected)
    - a scipy sparse matrix or a square 2-D array, read as an adjacency matrix
    - an ``(E, 2)`` array or any iterable of node-id pairs
    - a path to an edge-list file
    """
    if isinstance(X, Graph):
        return X
    if isinstance(X, str) or hasattr(X, "__fspath__"):
        return load_edge_list(X)
    if hasattr(X, "is_directed") and hasattr(X, "edges"):
        if X.is_directed():
            raise ValueError("directed graphs are not supported")
        return Graph.from_edges(X.edges())
    if sp.issparse(X):
        return _from_adjacency(X)
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise ValueError(f"expected a 2-D array, got {X.ndim}-D")
        if X.shape[0] == X.shape[1]:
            return _from_adjacency(X)
        if X.shape[1] == 2:
            return Graph.from_edges(X.tolist())
        raise ValueError(f"cannot interpret array of shape {X.shape} as a graph")
    try:
        pairs = [tuple(e) for e in X]
    except TypeError:
        raise TypeError(f"cannot interpret {type(X).__name__} as a graph") from None
    if any(len(e) != 2 for e in pairs):
        raise ValueError("edge iterable must yield pairs")
    return Graph.from_edges(pairs)
