"""Distance-driven aggregation of end-communities and the J-D consistency check.

End-communities are merged level by level: at level ``eps`` every pair at
distance ``eps`` is fused (max-linkage update), re-scanning the current
matrix in row-major order after each merge, with the merged community
appended as the last row. Each merge is scored against the Jaccard overlaps
of the communities present just before it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DegenerateGraphError
from .graph import D_INF, DistanceMatrix
from .propagation import PropagationState


def jaccard(a: Iterable, b: Iterable) -> float:
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        raise ValueError("Jaccard index of two empty sets is undefined")
    return len(a & b) / union


@dataclass
class JaccardMatrix:
    labels: list
    j: np.ndarray


def jaccard_matrix(node_sets: Sequence, labels: Sequence | None = None) -> JaccardMatrix:
    sets = [set(s) for s in node_sets]
    k = len(sets)
    j = np.eye(k)
    for p in range(k):
        for q in range(p + 1, k):
            j[p, q] = j[q, p] = jaccard(sets[p], sets[q])
    return JaccardMatrix(list(labels) if labels is not None else list(range(k)), j)


def jd_consistent(p, q, R: DistanceMatrix, J: JaccardMatrix) -> bool:
    """Whether merging ``p`` and ``q`` agrees with the Jaccard overlaps.

    Every community ``z`` that is farther from ``p`` or from ``q`` than
    ``r_pq`` must overlap less with each of them than they overlap with each
    other. Communities at distance ``r_pq`` from both are exempt.
    """
    ip, iq = R.labels.index(p), R.labels.index(q)
    jp, jq = J.labels.index(p), J.labels.index(q)
    r_pq = R.d[ip, iq]
    j_pq = J.j[jp, jq]
    for z in R.labels:
        if z == p or z == q:
            continue
        iz, jz = R.labels.index(z), J.labels.index(z)
        if R.d[ip, iz] > r_pq or R.d[iq, iz] > r_pq:
            if not (j_pq > J.j[jp, jz] and j_pq > J.j[jq, jz]):
                return False
    return True


@dataclass(frozen=True)
class MergeEvent:
    epsilon: int
    left: int
    right: int
    merged: int
    jd_consistent: bool


@dataclass(frozen=True)
class Cutoff:
    epsilon: int
    n_communities: int
    tag: str  # "plateau", "phi-peak" or "both"


@dataclass(frozen=True)
class CutoffSuggestions:
    items: tuple
    note: str | None = None

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    @property
    def epsilons(self) -> list:
        return [c.epsilon for c in self.items]


@dataclass
class CommunityHierarchy:
    """Merge tree over end-communities.

    Handles ``0 .. n_end - 1`` are end-communities (handle ``s`` is seeded by
    the ``s``-th hub); merge ``k`` creates handle ``n_end + k``.
    ``levels[eps]`` lists the handles alive at the end of level ``eps``.
    """

    end_nodes: list
    end_names: list
    merges: list
    levels: list
    eps_max: int
    truncated_by_disconnection: bool
    _children: dict = field(default_factory=dict, repr=False)

    @property
    def n_end(self) -> int:
        return len(self.end_nodes)

    @property
    def n_consistent(self) -> int:
        return sum(m.jd_consistent for m in self.merges)

    def children(self, handle: int) -> tuple | None:
        return self._children.get(handle)

    def leaves(self, handle: int) -> list:
        """End-communities beneath ``handle`` in the merge tree."""
        out, stack = [], [handle]
        while stack:
            h = stack.pop()
            kids = self._children.get(h)
            if kids is None:
                out.append(h)
            else:
                stack.extend(kids)
        return sorted(out)

    def members(self, handle: int) -> np.ndarray:
        """Sorted node indices of a (possibly merged) community."""
        return np.unique(np.concatenate([self.end_nodes[s] for s in self.leaves(handle)]))

    def name(self, handle: int) -> str:
        """Lineage string such as ``"0+33"`` built from hub ids."""
        parts, stack = [], [handle]
        while stack:
            h = stack.pop()
            kids = self._children.get(h)
            if kids is None:
                parts.append(str(self.end_names[h]))
            else:
                stack.extend(reversed(kids))
        return "+".join(parts)

    def communities_at(self, eps: int) -> list:
        """Node sets of the communities alive at level ``eps``."""
        eps = min(eps, len(self.levels) - 1)
        return [self.members(h) for h in self.levels[eps]]

    # curves -----------------------------------------------------------------

    @property
    def epsilons(self) -> list:
        return list(range(len(self.levels)))

    @property
    def sizes(self) -> list:
        """``|R_eps|`` for each level."""
        return [len(lv) for lv in self.levels]

    @property
    def deltas(self) -> list:
        """``Delta|R_eps|`` (communities removed at each level; 0 at eps = 0)."""
        s = self.sizes
        return [0] + [s[e - 1] - s[e] for e in range(1, len(s))]

    @property
    def phi_levels(self) -> list:
        """Fraction of J-D consistent merges per level (``None`` if none happened)."""
        out = [None] * len(self.levels)
        for e in range(1, len(self.levels)):
            ev = [m for m in self.merges if m.epsilon == e]
            if ev:
                out[e] = sum(m.jd_consistent for m in ev) / len(ev)
        return out

    @property
    def phi(self) -> float | None:
        return phi(self)

    def curves(self) -> list:
        return [
            {"epsilon": e, "n_communities": n, "delta": d, "phi_epsilon": p}
            for e, n, d, p in zip(self.epsilons, self.sizes, self.deltas, self.phi_levels)
        ]

    def write_curves_csv(self, dest) -> None:
        rows = ["epsilon,n_communities,delta,phi_epsilon\n"]
        for c in self.curves():
            p = "" if c["phi_epsilon"] is None else repr(c["phi_epsilon"])
            rows.append(f"{c['epsilon']},{c['n_communities']},{c['delta']},{p}\n")
        if hasattr(dest, "write"):
            dest.writelines(rows)
        else:
            with open(dest, "w") as fh:
                fh.writelines(rows)

    def to_dict(self, labels: Sequence | None = None) -> dict:
        lab = (lambda i: labels[i]) if labels is not None else (lambda i: int(i))
        return {
            "end_communities": [
                {"handle": s, "hub": str(self.end_names[s]),
                 "nodes": [lab(i) for i in self.end_nodes[s]]}
                for s in range(self.n_end)
            ],
            "merge_events": [
                {"epsilon": m.epsilon, "left": m.left, "right": m.right,
                 "merged": m.merged,
                 "jd_consistent": m.jd_consistent}
                for m in self.merges
            ],
            "levels": [list(map(int, lv)) for lv in self.levels],
            "eps_max": self.eps_max,
            "truncated_by_disconnection": self.truncated_by_disconnection,
            "phi": self.phi,
            "curves": self.curves(),
        }

    def to_json(self, labels: Sequence | None = None) -> str:
        return json.dumps(self.to_dict(labels))


def phi(h: CommunityHierarchy, S_size: int | None = None) -> float | None:
    """J-D consistency factor; ``None`` when there are at most two end-communities.

    For a connected graph this is ``(consistent - 1) / (|S| - 2)``. When the
    aggregation stops at several components the denominator becomes the
    number of merges minus one and the value is floored at 0.
    """
    k = h.n_end if S_size is None else S_size
    if k <= 2:
        return None
    m = len(h.merges)
    if m < 2:
        return 0.0
    return max(0.0, (h.n_consistent - 1) / (m - 1))


def build_hierarchy(state: PropagationState, R0: DistanceMatrix,
                    end_names: Sequence | None = None) -> CommunityHierarchy:
    """Aggregate end-communities along ``R0`` and score each merge.

    ``R0`` must be ordered like ``state.hubs``. Aggregation stops after the
    largest finite distance, or earlier once every remaining pair is
    unreachable.
    """
    k = state.n_communities
    if k == 0:
        raise DegenerateGraphError("no end-communities to aggregate")
    if len(R0) != k:
        raise ValueError("R0 must be |S| x |S|")
    end_nodes = [state.community_nodes(s).copy() for s in range(k)]
    names = list(end_names) if end_names is not None else list(R0.labels)
    eps_max = R0.eps_max

    # dense working state indexed by slot; a merged community reuses the slot of
    # its left child but gets a fresh rank, so it scans as the last row
    R = R0.d.astype(np.int64, copy=True)
    inter = _intersections(state, k)
    size = np.diag(inter).astype(np.int64).copy()
    alive = np.ones(k, dtype=bool)
    rank = np.arange(k, dtype=np.int64)
    handle = np.arange(k, dtype=np.int64)
    members = [set(nodes.tolist()) for nodes in end_nodes]
    # node -> end-communities holding it; roots resolved through `owner`
    node_ptr, node_comm = _node_communities(state)
    owner = np.arange(k)  # end-community -> current slot

    merges, levels, children = [], [[int(h) for h in handle]], {}
    next_handle, next_rank = k, k
    eps = 0
    all_inf = k > 1 and _all_off_inf(R, alive)
    while eps < eps_max and not all_inf and alive.sum() > 1:
        eps += 1
        hits = ((R == eps) & alive[None, :]).sum(axis=1)
        hits[~alive] = 0
        while True:
            rows = np.flatnonzero(hits > 0)
            if rows.size == 0:
                break
            p = rows[np.argmin(rank[rows])]
            cols = np.flatnonzero((R[p] == eps) & alive)
            q = cols[np.argmin(rank[cols])]

            ok = _jd_check(p, q, eps, R, inter, size, alive)

            # slots p, q -> merged slot p
            small, large = (members[p], members[q]) if len(members[p]) <= len(members[q]) else (members[q], members[p])
            both = small & large
            triple = _triple_counts(both, node_ptr, node_comm, owner, p, q, k)
            new_inter = inter[p] + inter[q] - triple
            new_size = size[p] + size[q] - len(both)
            new_row = np.maximum(R[p], R[q])

            # R stays symmetric, so rows stand in for (strided) columns
            hits -= (R[p] == eps) & alive
            hits -= (R[q] == eps) & alive
            alive[q] = False
            hits[q] = 0
            R[p, :] = new_row
            R[:, p] = new_row
            R[p, p] = 0
            inter[p, :] = new_inter
            inter[:, p] = new_inter
            inter[p, p] = new_size
            size[p] = new_size
            row_hits = (new_row == eps) & alive
            row_hits[p] = False
            hits += row_hits
            hits[p] = np.count_nonzero(row_hits)
            large.update(small)
            members[p] = large
            members[q] = None
            owner[owner == q] = p

            merged = next_handle
            next_handle += 1
            merges.append(MergeEvent(eps, int(handle[p]), int(handle[q]), merged, ok))
            children[merged] = (int(handle[p]), int(handle[q]))
            handle[p] = merged
            rank[p] = next_rank
            next_rank += 1
        order = np.flatnonzero(alive)
        order = order[np.argsort(rank[order])]
        levels.append([int(handle[s]) for s in order])
        all_inf = _all_off_inf(R, alive)

    survivors = int(alive.sum())
    return CommunityHierarchy(end_nodes=end_nodes, end_names=names, merges=merges, levels=levels,
                              eps_max=eps_max, truncated_by_disconnection=survivors > 1,
                              _children=children)


def _all_off_inf(R, alive) -> bool:
    idx = np.flatnonzero(alive)
    if idx.size < 2:
        return False
    # the zero diagonal is the only finite entry of each row when all else is unreachable
    finite = np.count_nonzero(R[np.ix_(idx, idx)] != D_INF, axis=1)
    return bool(np.all(finite == 1))


def _jd_check(p, q, eps, R, inter, size, alive) -> bool:
    # j_pq > j_pz  <=>  I_pq * U_pz > I_pz * U_pq  (exact integer comparison)
    z = alive & ((R[p] > eps) | (R[q] > eps))
    z[p] = z[q] = False
    if not z.any():
        return True
    i_pq = int(inter[p, q])
    if i_pq == 0:
        return False
    u_pq = int(size[p] + size[q] - i_pq)
    for a in (p, q):
        # disjoint z pass trivially once I_pq > 0
        zs = np.flatnonzero(z & (inter[a] > 0))
        i_az = inter[a, zs]
        u_az = size[a] + size[zs] - i_az
        if not np.all(i_pq * u_az > i_az * u_pq):
            return False
    return True


def _intersections(state: PropagationState, k: int) -> np.ndarray:
    """``|x_p ∩ x_q|`` for all pairs of end-communities (diagonal = sizes)."""
    import scipy.sparse as sp

    m = sp.csr_matrix((np.ones(len(state.comm), dtype=np.int64), (state.comm, state.node)),
                      shape=(k, state.n_nodes))
    return (m @ m.T).toarray().astype(np.int64)


def _node_communities(state: PropagationState):
    """CSR lookup ``node -> end-communities``: ``comm[ptr[i]:ptr[i + 1]]``."""
    order = np.argsort(state.node, kind="stable")
    ptr = np.zeros(state.n_nodes + 1, dtype=np.int64)
    np.cumsum(np.bincount(state.node, minlength=state.n_nodes), out=ptr[1:])
    return ptr, state.comm[order]


def _triple_counts(both, ptr, comm, owner, p, q, k) -> np.ndarray:
    """``|x_p ∩ x_q ∩ x_z|`` for every slot ``z`` other than ``p`` and ``q``."""
    triple = np.zeros(k, dtype=np.int64)
    if not both:
        return triple
    nodes = np.fromiter(both, dtype=np.int64, count=len(both))
    lens = ptr[nodes + 1] - ptr[nodes]
    offsets = np.repeat(ptr[nodes] - np.cumsum(lens) + lens, lens) + np.arange(lens.sum())
    slots = owner[comm[offsets]]
    # a node counts once per slot, however many of its end-communities merged into it
    keys = np.unique(np.repeat(nodes, lens) * k + slots)
    slots = keys % k
    slots = slots[(slots != p) & (slots != q)]
    triple += np.bincount(slots, minlength=k)
    return triple


def suggest_cutoffs(h: CommunityHierarchy) -> CutoffSuggestions:
    """Candidate cutoff levels from the hierarchy curves.

    A level is a ``plateau`` candidate when it removes communities but the
    next level removes none, and a ``phi-peak`` candidate when its per-level
    consistency is strictly above the nearest scored levels on both sides.
    """
    n_levels = len(h.levels)
    if n_levels < 2:
        return CutoffSuggestions((), "hierarchy has fewer than two levels")
    deltas, sizes, phis = h.deltas, h.sizes, h.phi_levels
    tags = {}
    for e in range(1, n_levels - 1):
        if deltas[e] > 0 and deltas[e + 1] == 0:
            tags[e] = {"plateau"}
    scored = [e for e in range(1, n_levels) if phis[e] is not None]
    for a, e, b in zip(scored, scored[1:], scored[2:]):
        if phis[e] > phis[a] and phis[e] > phis[b]:
            tags.setdefault(e, set()).add("phi-peak")
    items = tuple(
        Cutoff(e, sizes[e], "both" if len(t) == 2 else next(iter(t)))
        for e, t in sorted(tags.items())
    )
    note = None if items else "no plateau on the community-count curve and no interior peak of per-level consistency"
    return CutoffSuggestions(items, note)


def brute_force_phi(end_sets: Sequence, R0: np.ndarray) -> tuple:
    """Reference aggregation with plain Python sets and exact fractions.

    Returns ``(flags, eps_of_each_merge)``. Used to cross-check
    :func:`build_hierarchy`; quadratic per merge, small inputs only.
    """
    comms = [("e", s) for s in range(len(end_sets))]
    nodes = {c: frozenset(end_sets[c[1]]) for c in comms}
    dist = {(a, b): int(R0[a[1], b[1]]) for a in comms for b in comms}
    finite = [v for (a, b), v in dist.items() if a != b and v != D_INF]
    top = max(finite) if finite else 0
    flags, when = [], []
    serial = 0
    for eps in range(1, top + 1):
        if len(comms) > 1 and all(dist[a, b] == D_INF for a in comms for b in comms if a != b):
            break
        while True:
            found = next(((a, b) for a in comms for b in comms if a != b and dist[a, b] == eps), None)
            if found is None:
                break
            p, q = found

            def jac(a, b):
                return Fraction(len(nodes[a] & nodes[b]), len(nodes[a] | nodes[b]))

            good = all(
                jac(p, q) > jac(p, z) and jac(p, q) > jac(q, z)
                for z in comms
                if z not in (p, q) and (dist[p, z] > eps or dist[q, z] > eps)
            )
            flags.append(good)
            when.append(eps)
            serial += 1
            m = ("m", serial)
            nodes[m] = nodes[p] | nodes[q]
            rest = [z for z in comms if z not in (p, q)]
            for z in rest:
                dist[m, z] = dist[z, m] = max(dist[p, z], dist[q, z])
            dist[m, m] = 0
            comms = rest + [m]
    return flags, when
