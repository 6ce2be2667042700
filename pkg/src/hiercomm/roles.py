"""Classification of nodes into hubs, inner members, boundaries, leaves and isolates."""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import CentralityVector, Graph


class Role(str, Enum):
    HUB = "hub"
    INNER = "inner"
    BOUNDARY = "boundary"
    LEAF = "leaf"
    ISOLATED = "isolated"


ROLES = tuple(Role)
_CODE = {r: k for k, r in enumerate(ROLES)}


@dataclass(frozen=True)
class RoleAssignment:
    """Per-node role codes (indices into :data:`ROLES`) plus the hub list.

    ``hubs`` holds internal node indices in ascending order; community ``s``
    is the one seeded by ``hubs[s]``.
    """

    codes: np.ndarray
    hubs: np.ndarray

    def __len__(self):
        return len(self.codes)

    def role(self, i: int) -> Role:
        return ROLES[self.codes[i]]

    def mask(self, role) -> np.ndarray:
        return self.codes == _CODE[Role(role)]

    @property
    def counts(self) -> dict:
        tally = np.bincount(self.codes, minlength=len(ROLES))
        return {r.value: int(tally[k]) for k, r in enumerate(ROLES)}

    def to_csv(self, g: Graph, dest) -> None:
        """Write ``node_id,role`` rows (with header) to a path or stream."""
        rows = ["node_id,role\n"]
        rows += [f"{g.labels[i]},{ROLES[c].value}\n" for i, c in enumerate(self.codes)]
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w") as fh:
                fh.writelines(rows)
        else:
            dest.writelines(rows)


def classify_roles(g: Graph, c: CentralityVector) -> RoleAssignment:
    """Assign one role to every node from its centrality relative to its neighbors.

    Hubs and isolates are decided first (local peak, strict or flat), then
    degree-1 leaves, then strict troughs (boundaries); everything else is an
    inner member.
    """
    if len(c) != g.n_nodes:
        raise ValueError(f"centrality has {len(c)} entries for {g.n_nodes} nodes")
    deg = g.degree
    src = np.repeat(np.arange(g.n_nodes), deg)
    dst = g.indices
    above = c.greater(src, dst)  # node beats this neighbor
    below = c.greater(dst, src)  # neighbor beats node
    n_above = np.bincount(src, weights=above, minlength=g.n_nodes)
    n_below = np.bincount(src, weights=below, minlength=g.n_nodes)

    codes = np.full(g.n_nodes, _CODE[Role.INNER], dtype=np.int8)
    hub = (n_below == 0) & (n_above > 0)
    isolated = (n_below == 0) & (n_above == 0)
    leaf = ~hub & ~isolated & (deg == 1)
    boundary = ~hub & ~isolated & ~leaf & (n_below == deg) & (deg >= 2)
    codes[boundary] = _CODE[Role.BOUNDARY]
    codes[leaf] = _CODE[Role.LEAF]
    codes[isolated] = _CODE[Role.ISOLATED]
    codes[hub] = _CODE[Role.HUB]
    return RoleAssignment(codes, np.flatnonzero(hub))
