"""Self-falsification against size-matched Erdős–Rényi null graphs."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import DegenerateGraphError, EmptyGraphError
from .graph import Graph, _build


def _triu_pairs(k: np.ndarray, n: int):
    """Map linear indices over the strict upper triangle to ``(i, j)``."""
    k = k.astype(np.int64)
    m = n * (n - 1) // 2
    i = n - 2 - np.floor(np.sqrt(-8.0 * k + 4.0 * n * (n - 1) - 7) / 2.0 - 0.5).astype(np.int64)

    def start(r):
        return r * (2 * n - r - 1) // 2

    # one-step correction for floating-point error in the closed form
    i = np.where(start(i) > k, i - 1, i)
    i = np.where(start(i + 1) <= k, i + 1, i)
    j = k - start(i) + i + 1
    assert np.all((0 <= i) & (i < j) & (j < n)) and np.all(k < m)
    return i, j


def generate_er(n: int, p: float, seed=None) -> Graph:
    """Sample ``G(n, p)`` and drop degree-0 nodes.

    The edge count is drawn from ``Binomial(n(n-1)/2, p)`` and that many
    distinct node pairs are chosen uniformly, which is equivalent to keeping
    each pair independently with probability ``p``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    m = n * (n - 1) // 2
    k = int(rng.binomial(m, p))
    if k == 0:
        raise EmptyGraphError(f"G({n}, {p}) draw has no edges")
    idx = np.sort(rng.choice(m, size=k, replace=False))
    i, j = _triu_pairs(idx, n)
    return _build([str(a) for a in i.tolist()], [str(b) for b in j.tolist()])


def match_null(g: Graph) -> tuple:
    """``(n, p)`` of the ER ensemble whose expected size matches ``g``."""
    n = g.n_nodes
    return n, 2.0 * g.n_edges / (n * (n - 1))


@dataclass
class FalsifiabilityVerdict:
    verdict: str  # "valid", "suspect" or "not-applicable"
    seed: int
    replicate_count: int
    real_hub_fraction: float | None
    real_phi: float | None
    null_n: int
    null_p: float
    replicate_seeds: list = field(default_factory=list)
    null_hub_fractions: list = field(default_factory=list)
    null_phis: list = field(default_factory=list)
    null_hub_fraction_median: float | None = None
    null_phi_median: float | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FalsifiabilityVerdict":
        return cls(**d)


def _summarize(g: Graph, centrality: str):
    from .estimator import OverlappingCommunityDetector

    try:
        det = OverlappingCommunityDetector(centrality=centrality).fit(g)
    except DegenerateGraphError:
        return None, None
    return det.hub_fraction_, det.phi_


def _null_replicate(args):
    n, p, seed, centrality = args
    try:
        null = generate_er(n, p, seed)
    except EmptyGraphError:
        return None, None
    return _summarize(null, centrality)


def falsifiability_check(g: Graph, replicates: int = 10, seed: int = 0,
                         centrality: str = "degree", workers: int = 1,
                         real=None) -> FalsifiabilityVerdict:
    """Compare hub fraction and consistency factor of ``g`` with ER nulls.

    The detection is ``suspect`` when the real hub fraction is not below the
    null median, or the real consistency factor is not above the null
    median. ``real`` may pass a precomputed ``(hub_fraction, phi)``.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    n, p = match_null(g)
    seeds = [int(s) for s in np.random.SeedSequence(seed).generate_state(replicates, dtype=np.uint64)]
    if len(set(seeds)) != len(seeds):
        raise RuntimeError("replicate seeds collided")
    real_hf, real_phi = real if real is not None else _summarize(g, centrality)
    if real_hf is None:
        # nothing to compare; a hub-free graph may be complete, where no G(n, p<1) null exists
        return FalsifiabilityVerdict(verdict="not-applicable", seed=seed, replicate_count=replicates,
                                     real_hub_fraction=None, real_phi=None, null_n=n, null_p=p,
                                     replicate_seeds=seeds, reason="no hubs in the input graph")

    jobs = [(n, p, s, centrality) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_null_replicate, jobs))
    else:
        results = [_null_replicate(j) for j in jobs]
    null_hf = [r[0] for r in results]
    null_phi = [r[1] for r in results]

    verdict = FalsifiabilityVerdict(
        verdict="not-applicable", seed=seed, replicate_count=replicates,
        real_hub_fraction=real_hf, real_phi=real_phi, null_n=n, null_p=p,
        replicate_seeds=seeds, null_hub_fractions=null_hf, null_phis=null_phi,
    )
    hf_ok = [x for x in null_hf if x is not None]
    phi_ok = [x for x in null_phi if x is not None]
    if hf_ok:
        verdict.null_hub_fraction_median = statistics.median(hf_ok)
    if phi_ok:
        verdict.null_phi_median = statistics.median(phi_ok)

    if real_phi is None:
        verdict.reason = "consistency factor undefined for the input graph (at most two hubs)"
    elif not phi_ok:
        verdict.reason = "consistency factor undefined on every null replicate"
    elif (real_hf >= verdict.null_hub_fraction_median
          or real_phi <= verdict.null_phi_median):
        verdict.verdict = "suspect"
    else:
        verdict.verdict = "valid"
    return verdict
