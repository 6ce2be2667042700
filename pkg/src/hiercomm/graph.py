"""Undirected simple graphs, centrality scores and hub-to-hub distances."""

from __future__ import annotations

import gzip
import io
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import ConvergenceError, EdgeListParseError, EmptyGraphError

#: Sentinel distance between hubs that lie in different components.
D_INF = int(np.iinfo(np.int64).max)


class Measure(str, Enum):
    DEGREE = "degree"
    EIGENVECTOR = "eigenvector"


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph in CSR form.

    Node ``i`` has external id ``labels[i]`` and neighbors
    ``indices[indptr[i]:indptr[i + 1]]`` (sorted ascending). Build graphs with
    :meth:`from_edges` or :func:`load_edge_list`, which enforce the cleaning
    rules: no self-loops, no duplicate edges and no degree-0 nodes.
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple
    n_self_loops: int = 0
    n_duplicates: int = 0
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        if self._index is None:
            object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def index_of(self, label) -> int:
        """Internal index of an external node id (ints and strings both accepted)."""
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown node {label!r}") from None

    def edges(self) -> np.ndarray:
        """``(E, 2)`` array of internal edges with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.n_nodes), self.degree)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n_nodes,) * 2)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence]) -> "Graph":
        """Build a cleaned graph from pairs of external node ids."""
        us, vs = [], []
        for u, v in edges:
            us.append(str(u))
            vs.append(str(v))
        return _build(us, vs)


def _sort_key_factory(labels):
    try:
        ints = {lab: int(lab) for lab in labels}
    except ValueError:
        return lambda lab: lab
    return ints.__getitem__


def _build(us: list, vs: list) -> Graph:
    if not us:
        raise EmptyGraphError("graph has no edges")
    n_self = sum(1 for u, v in zip(us, vs) if u == v)
    pairs = [(u, v) for u, v in zip(us, vs) if u != v]
    used = set()
    for u, v in pairs:
        used.add(u)
        used.add(v)
    if not used:
        raise EmptyGraphError("graph is empty after removing self-loops and degree-0 nodes")
    # integer ids sort numerically so that re-loading a serialized graph is stable
    labels = tuple(sorted(used, key=_sort_key_factory(used)))
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    u = np.fromiter((index[a] for a, _ in pairs), dtype=np.int64, count=len(pairs))
    v = np.fromiter((index[b] for _, b in pairs), dtype=np.int64, count=len(pairs))
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    keys = np.unique(lo * n + hi)
    n_dup = len(pairs) - len(keys)
    lo, hi = np.divmod(keys, n)
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(indptr, dst.astype(np.int64), labels, n_self_loops=n_self,
                 n_duplicates=n_dup, _index=index)


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        if path.endswith(".gz"):
            return gzip.open(path, "rt")
        return open(path)
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode())
    return source


def load_edge_list(source, numeric: bool = False, delimiter: str | None = None,
                   header: bool = False) -> Graph:
    """Parse a ``u v`` edge list.

    ``source`` is a path (``.gz`` is decompressed on the fly), an open text
    stream or any iterable of lines. Lines starting with ``#`` or ``%`` and
    blank lines are skipped. Tokens are split on whitespace, or on
    ``delimiter`` when given; ``header=True`` drops the first data line.
    With ``numeric=True`` every id must be an integer.
    """
    stream = _open_text(source)
    us, vs = [], []
    try:
        for lineno, line in enumerate(stream, start=1):
            line = line.strip()
            if not line or line.startswith(("#", "%")):
                continue
            if header:
                header = False
                continue
            tokens = line.split(delimiter) if delimiter else line.split()
            tokens = [t.strip() for t in tokens]
            if len(tokens) != 2:
                raise EdgeListParseError(f"expected 2 tokens, got {len(tokens)}: {line!r}", lineno)
            if numeric:
                try:
                    tokens = [str(int(t)) for t in tokens]
                except ValueError:
                    raise EdgeListParseError(f"non-numeric node id in {line!r}", lineno) from None
            us.append(tokens[0])
            vs.append(tokens[1])
    finally:
        if stream is not source:
            stream.close()
    return _build(us, vs)


def write_edge_list(g: Graph, dest) -> None:
    """Write ``g`` as an edge list readable by :func:`load_edge_list`."""
    lines = "".join(f"{g.labels[u]} {g.labels[v]}\n" for u, v in g.edges())
    if isinstance(dest, (str, os.PathLike)):
        opener = gzip.open if os.fspath(dest).endswith(".gz") else open
        with opener(dest, "wt") as fh:
            fh.write(lines)
    else:
        dest.write(lines)


@dataclass(frozen=True)
class CentralityVector:
    scores: np.ndarray
    measure: Measure

    def __len__(self):
        return len(self.scores)

    @property
    def tie_tol(self) -> float:
        """Absolute tolerance under which two scores count as equal."""
        if self.measure is Measure.DEGREE or len(self.scores) == 0:
            return 0.0
        return 1e-9 * float(np.max(self.scores))

    def greater(self, i, j):
        """Elementwise ``c_i > c_j`` honouring :attr:`tie_tol`."""
        return (self.scores[i] - self.scores[j]) > self.tie_tol


def degree_centrality(g: Graph) -> CentralityVector:
    return CentralityVector(g.degree.copy(), Measure.DEGREE)


def eigenvector_centrality(g: Graph, tol: float = 1e-10, max_iter: int = 1000) -> CentralityVector:
    """Leading eigenvector of the adjacency matrix by power iteration.

    Iterates on ``A + I`` (same eigenvectors, but no oscillation on bipartite
    graphs) from the uniform vector until the max-abs change drops below
    ``tol``. The result is L2-normalized and non-negative.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = g.adjacency().astype(np.float64)
    x = np.full(g.n_nodes, 1.0 / np.sqrt(g.n_nodes))
    for it in range(1, max_iter + 1):
        y = a @ x + x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < tol:
            return CentralityVector(np.abs(y), Measure.EIGENVECTOR)
        x = y
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations",
                           last=x, n_iter=max_iter)


def centrality(g: Graph, measure="degree", **kwargs) -> CentralityVector:
    measure = Measure(measure)
    if measure is Measure.DEGREE:
        return degree_centrality(g)
    return eigenvector_centrality(g, **kwargs)


@dataclass
class DistanceMatrix:
    """Square matrix of hop distances between community handles.

    Unreachable pairs hold :data:`D_INF`.
    """

    labels: list
    d: np.ndarray
    stage: int = 0

    def __len__(self):
        return len(self.labels)

    @property
    def eps_max(self) -> int:
        """Largest finite off-diagonal entry (0 for a 1x1 matrix)."""
        finite = self.d[(self.d != D_INF) & ~np.eye(len(self), dtype=bool)]
        return int(finite.max()) if finite.size else 0

    d_max = eps_max


def hub_distances(g: Graph, hubs: Sequence[int], max_block_bytes: int = 1 << 25) -> DistanceMatrix:
    """BFS hop counts between every pair of hubs (internal indices).

    Runs one breadth-first search per hub, 64 searches at a time packed into
    the bits of a ``uint64`` word per node. Each level only pulls along edges
    from nodes on some frontier into nodes that some search has not reached.
    """
    hubs = np.asarray(hubs, dtype=np.int64)
    k = len(hubs)
    out = np.full((k, k), D_INF, dtype=np.int64)
    if k == 0:
        return DistanceMatrix([], out, stage=0)
    n = g.n_nodes
    target = np.repeat(np.arange(n), g.degree)
    words = max(1, max_block_bytes // (8 * max(len(g.indices), 1)))
    for lo in range(0, k, 64 * words):
        src = np.arange(lo, min(k, lo + 64 * words))
        w = (len(src) + 63) // 64
        rel = src - lo
        bit = np.left_shift(np.uint64(1), (rel % 64).astype(np.uint64))
        full = np.zeros(w, dtype=np.uint64)
        np.bitwise_or.at(full, rel // 64, bit)
        frontier = np.zeros((n, w), dtype=np.uint64)
        frontier[hubs[src], rel // 64] |= bit
        visited = frontier.copy()
        # a hub first reached at level d is still unreached after levels 1..d-1
        unseen = np.zeros((k, len(src)), dtype=np.int64)
        while True:
            active = frontier.any(axis=1)
            unreached = (visited != full).any(axis=1)
            sel = np.flatnonzero(active[g.indices] & unreached[target])
            if sel.size == 0:
                break
            t = target[sel]
            starts = np.flatnonzero(np.r_[True, t[1:] != t[:-1]])
            rows = t[starts]
            vals = np.bitwise_or.reduceat(frontier[g.indices[sel]], starts, axis=0)
            vals &= ~visited[rows]
            frontier = np.zeros_like(frontier)
            frontier[rows] = vals
            visited[rows] |= vals
            seen = _unpack(visited[hubs], len(src))
            unseen += seen == 0
            if seen.all():
                break
        block = unseen + 1
        block[_unpack(visited[hubs], len(src)) == 0] = D_INF
        out[src, :] = block.T
    np.fill_diagonal(out, 0)
    return DistanceMatrix(list(hubs.tolist()), out, stage=0)


def _unpack(words: np.ndarray, n_bits: int) -> np.ndarray:
    """Bit ``j`` of row ``i`` (little-endian packing) as ``out[i, j]``."""
    return np.unpackbits(words.astype("<u8", copy=False).view(np.uint8), axis=1,
                         bitorder="little")[:, :n_bits]
