"""Pipeline orchestration, the JSON detection report and runtime scaling fits."""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .datasets import DATA_DIR_ENV, load_graph
from .estimator import OverlappingCommunityDetector
from .exceptions import InsufficientDataError
from .falsify import FalsifiabilityVerdict, falsifiability_check

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"

#: Columns of the summary table, in order.
TABLE_COLUMNS = ("network", "n_nodes", "n_edges", "hub", "boundary", "isolated", "leaf",
                 "inner", "t_fin", "m_h", "m_x", "eps_max", "phi")


@dataclass
class DetectionReport:
    network_name: str
    n_nodes: int
    n_edges: int
    role_counts: dict
    hubs: list
    t_fin: int
    iterations: int
    m_h: float
    m_x: float
    eps_max: int
    phi: float | None
    phi_applicable: bool
    n_merges: int
    n_consistent_merges: int
    truncated_by_disconnection: bool
    n_multi_membership: int
    cutoffs: list
    cutoff_note: str | None
    curves: list
    hierarchy: dict
    step_infections: list
    options: dict
    warnings: dict
    timing: dict
    falsifiability: dict | None = None
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DetectionReport":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})

    def to_json(self, path=None, indent=2) -> str:
        text = json.dumps(self.to_dict(), indent=indent)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_json(cls, text_or_path) -> "DetectionReport":
        text = str(text_or_path)
        if not text.lstrip().startswith("{"):
            text = Path(text_or_path).read_text()
        return cls.from_dict(json.loads(text))

    def table_row(self) -> dict:
        rc = self.role_counts
        return dict(zip(TABLE_COLUMNS, (
            self.network_name, self.n_nodes, self.n_edges, rc["hub"], rc["boundary"],
            rc["isolated"], rc["leaf"], rc["inner"], self.t_fin, round(self.m_h, 2),
            round(self.m_x, 1), self.eps_max, self.phi)))

    def write_curves_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("epsilon,n_communities,delta,phi_epsilon\n")
            for c in self.curves:
                p = "" if c["phi_epsilon"] is None else repr(c["phi_epsilon"])
                fh.write(f"{c['epsilon']},{c['n_communities']},{c['delta']},{p}\n")

    def write_timing_csv(self, path, normalized=False) -> None:
        steps, secs = _step_series(self, normalized)
        with open(path, "w") as fh:
            fh.write("step,infections,cumulative_seconds\n")
            for step, inf, sec in zip(steps, self.step_infections, secs):
                fh.write(f"{step},{inf},{sec}\n")

    def normalized_step_curve(self) -> list:
        """Cumulative propagation time per step with both axes scaled to ``[0, 1]``."""
        steps, secs = _step_series(self, normalized=True)
        return list(zip(steps, secs))


def _step_series(report: DetectionReport, normalized: bool):
    secs = list(report.timing.get("step2_cumulative_seconds", []))
    steps = list(range(1, len(secs) + 1))
    if normalized and secs:
        total = secs[-1] or 1.0
        steps = [s / len(secs) for s in steps]
        secs = [s / total for s in secs]
    return steps, secs


def resolve_input(path) -> Path:
    p = Path(path)
    if not p.exists() and os.environ.get(DATA_DIR_ENV):
        alt = Path(os.environ[DATA_DIR_ENV]) / p
        if alt.exists():
            return alt
    return p


def build_report(det: OverlappingCommunityDetector, name: str, options: dict,
                 verdict: FalsifiabilityVerdict | None = None, load_seconds: float = 0.0,
                 falsify_seconds: float = 0.0) -> DetectionReport:
    g, h, st = det.graph_, det.hierarchy_, det.propagation_
    applicable = det.phi_ is not None
    stages = {"load": load_seconds, **det.timings_}
    if verdict is not None:
        stages["falsify"] = falsify_seconds
    return DetectionReport(
        network_name=name,
        n_nodes=g.n_nodes,
        n_edges=g.n_edges,
        role_counts=det.roles_.counts,
        hubs=list(det.hubs_),
        t_fin=st.t_fin,
        iterations=st.t_fin + (0 if st.truncated else 1),
        m_h=det.metrics_.m_h,
        m_x=det.metrics_.m_x,
        eps_max=h.eps_max,
        phi=det.phi_ if applicable else 1.0,
        phi_applicable=applicable,
        n_merges=len(h.merges),
        n_consistent_merges=h.n_consistent,
        truncated_by_disconnection=h.truncated_by_disconnection,
        n_multi_membership=st.n_multi_membership,
        cutoffs=[asdict(c) for c in det.cutoffs_],
        cutoff_note=det.cutoffs_.note,
        curves=h.curves(),
        hierarchy=h.to_dict(g.labels),
        step_infections=list(st.step_infections),
        options=dict(options),
        warnings={"duplicate_edges": g.n_duplicates, "self_loops": g.n_self_loops,
                  "propagation_truncated": st.truncated},
        timing={"stages": stages, "total_seconds": sum(stages.values()),
                "step2_cumulative_seconds": list(st.step_seconds)},
        falsifiability=verdict.to_dict() if verdict is not None else None,
    )


def run_pipeline(input_path, name=None, centrality="degree", t_max=None, falsify=False,
                 replicates=10, seed=0, workers=1, overlap_steps=False,
                 out=None, curves=None) -> DetectionReport:
    """Load a graph, detect communities and assemble the report.

    Writes the JSON report to ``out`` and the hierarchy curves to ``curves``
    when those paths are given.
    """
    path = resolve_input(input_path)
    options = {"centrality": centrality, "t_max": t_max, "falsify": falsify,
               "replicates": replicates, "seed": seed}
    tic = time.perf_counter()
    g = load_graph(path)
    load_seconds = time.perf_counter() - tic
    logger.info("loaded %s: %d nodes, %d edges", path, g.n_nodes, g.n_edges)

    det = OverlappingCommunityDetector(centrality=centrality, t_max=t_max,
                                       overlap_steps=overlap_steps).fit(g)
    verdict, falsify_seconds = None, 0.0
    if falsify:
        tic = time.perf_counter()
        verdict = falsifiability_check(g, replicates=replicates, seed=seed, centrality=centrality,
                                       workers=workers, real=(det.hub_fraction_, det.phi_))
        falsify_seconds = time.perf_counter() - tic
    report = build_report(det, name or _stem(path), options, verdict, load_seconds, falsify_seconds)
    if out is not None:
        report.to_json(out)
    if curves is not None:
        report.write_curves_csv(curves)
    return report


def _stem(path) -> str:
    name = Path(path).name
    for suffix in (".gz", ".txt", ".edges", ".edgelist", ".csv", ".gml"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return name


@dataclass
class ScalingSummary:
    slope: float
    intercept: float
    n_edges: list = field(default_factory=list)
    total_seconds: list = field(default_factory=list)


def timing_scaling_report(reports, min_decades: float = 2.0) -> ScalingSummary:
    """Least-squares slope of log(total runtime) against log(edge count)."""
    reports = list(reports)
    if len(reports) < 3:
        raise InsufficientDataError(f"need at least 3 reports, got {len(reports)}")
    edges = np.array([r.n_edges for r in reports], dtype=float)
    secs = np.array([r.timing["total_seconds"] for r in reports], dtype=float)
    span = np.log10(edges.max()) - np.log10(edges.min())
    if span < min_decades:
        raise InsufficientDataError(f"edge counts span {span:.2f} decades; need {min_decades}")
    if np.any(secs <= 0):
        raise InsufficientDataError("non-positive runtime in reports")
    slope, intercept = np.polyfit(np.log10(edges), np.log10(secs), 1)
    return ScalingSummary(float(slope), float(intercept), edges.astype(int).tolist(), secs.tolist())
