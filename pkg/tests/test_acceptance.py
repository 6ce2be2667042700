"""Acceptance criteria, one PASS/FAIL line each.

Every test records its line through the ``acceptance_line`` fixture before
asserting, so the summary section lists all criteria even when some fail.
"""

import statistics
import time

import networkx as nx
import numpy as np
import pytest

from hiercomm import (DegenerateGraphError, Graph, OverlappingCommunityDetector, generate_er,
                      run_pipeline, timing_scaling_report, write_edge_list)
from hiercomm.datasets import data_dirs, find_dataset, load_graph
from oracles import (INF, adjacency, aggregate, bfs_hops, degree_roles, phi_from_events,
                     simulate_propagation)

ROLE_ORDER = ("hub", "boundary", "isolated", "leaf", "inner")
DOLPHIN_HUB_FRACTION = 5 / 62


def find_dolphins():
    for name in ("dolphins", "dolphin"):
        path = find_dataset(name)
        if path is not None:
            return path
    return None


def missing_dolphins():
    where = ", ".join(map(str, data_dirs())) or "HIERCOMM_DATA_DIR unset"
    return f"dolphin network not found ({where}); supply dolphins.gml or dolphins.txt"


def two_copies(g):
    edges = [(g.labels[u], g.labels[v]) for u, v in g.edges()]
    return Graph.from_edges([(f"a{u}", f"a{v}") for u, v in edges] +
                            [(f"b{u}", f"b{v}") for u, v in edges])


def extract(g, det):
    """Communities, histories and merge events keyed by external ids."""
    st, lab = det.propagation_, g.labels
    X = {lab[st.hubs[s]]: {(lab[i], t) for i, t in st.community(s)} for s in range(st.n_communities)}
    H = {lab[i]: {(lab[st.hubs[s]], t) for s, t in st.history(i)} for i in range(g.n_nodes)}
    return X, H


def tuple_counts(det):
    """Membership tuples counted from the node side and the community side."""
    st = det.propagation_
    from_h = sum(len(st.history(i)) for i in range(st.n_nodes))
    from_x = sum(len(st.community(s)) for s in range(st.n_communities))
    return from_h, from_x


def identity_exact(det):
    m = det.metrics_
    from_h, from_x = tuple_counts(det)
    # m_h * N and m_x * |S| are both the tuple count; compare as integers
    return from_h == from_x == m.n_memberships and \
        round(m.m_h * m.n_nodes) == round(m.m_x * m.n_communities) == from_h


def label_adjacency(g):
    return adjacency((g.labels[u], g.labels[v]) for u, v in g.edges())


def connected_atlas():
    return [G for G in nx.graph_atlas_g() if G.number_of_nodes() >= 2 and nx.is_connected(G)]


def test_criterion_1_karate(tmp_path, karate, acceptance_line):
    path = tmp_path / "karate.txt"
    write_edge_list(karate, path)
    tic = time.perf_counter()
    r = run_pipeline(path)
    elapsed = time.perf_counter() - tic
    det = OverlappingCommunityDetector().fit(karate)
    counts = tuple(r.role_counts[k] for k in ROLE_ORDER)
    checks = {
        "hubs": set(r.hubs) == {"0", "33"},
        "counts": counts == (2, 16, 0, 1, 15),
        "m_h": abs(r.m_h - 1.5) <= 0.01,
        "m_x": abs(r.m_x - 25.5) <= 0.01,
        "eps_max": r.eps_max == 2,
        "t_fin": abs(r.t_fin - 5) <= 1,
        "phi": r.phi == 1.0 and not r.phi_applicable and det.phi_ is None,
        "runtime": elapsed < 1.0,
    }
    bad = [k for k, ok in checks.items() if not ok]
    ok = acceptance_line(1, not bad, f"hubs={r.hubs} counts={counts} m_h={r.m_h} m_x={r.m_x} "
                         f"eps_max={r.eps_max} t_fin={r.t_fin} phi={r.phi} "
                         f"(applicable={r.phi_applicable}) {elapsed:.3f}s failed={bad}")
    assert ok


def test_criterion_2_dolphin(acceptance_line):
    path = find_dolphins()
    if path is None:
        acceptance_line(2, False, missing_dolphins())
        pytest.fail(missing_dolphins())
    tic = time.perf_counter()
    r = run_pipeline(path)
    elapsed = time.perf_counter() - tic
    counts = tuple(r.role_counts[k] for k in ROLE_ORDER)
    cut2 = [c for c in r.cutoffs if c["epsilon"] == 2]
    checks = {
        "counts": counts == (5, 12, 0, 9, 36),
        "m_h": abs(r.m_h - 2.08) <= 0.01,
        "m_x": abs(r.m_x - 25.8) <= 0.1,
        "eps_max": r.eps_max == 4,
        "phi": r.phi == 1.0 and r.n_merges == 4 and r.n_consistent_merges == 4,
        "cutoff": bool(cut2) and cut2[0]["n_communities"] == 2,
        "runtime": elapsed < 1.0,
    }
    bad = [k for k, ok in checks.items() if not ok]
    ok = acceptance_line(2, not bad, f"counts={counts} m_h={r.m_h:.4f} m_x={r.m_x:.4f} "
                         f"eps_max={r.eps_max} phi={r.phi} merges={r.n_consistent_merges}/"
                         f"{r.n_merges} cutoffs={r.cutoffs} {elapsed:.3f}s failed={bad}")
    assert ok


def test_criterion_3_identity(karate, star4, path5, acceptance_line):
    graphs = {"star4": star4, "path5": path5, "karate": karate,
              "barbell9": Graph.from_edges([(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5),
                                            (5, 6), (5, 7), (6, 7), (4, 8)])}
    dolphins = find_dolphins()
    if dolphins is not None:
        graphs["dolphins"] = load_graph(dolphins)
    seeds = np.random.SeedSequence(3).generate_state(60)
    for k, seed in enumerate(seeds):
        n = 30 + 10 * (k % 20)
        graphs[f"er{k}"] = generate_er(n, 4.0 / n, seed=int(seed))
    failures, checked = [], 0
    for name, g in graphs.items():
        det = OverlappingCommunityDetector().fit(g)
        checked += 1
        if not identity_exact(det):
            failures.append(name)
    n_er = sum(1 for k in graphs if k.startswith("er"))
    ok = acceptance_line(3, not failures and n_er >= 50,
                         f"{checked} graphs ({n_er} ER, dolphins {'in' if dolphins else 'absent'}) "
                         f"failures={failures}")
    assert ok


def test_criterion_4_propagation_oracle(acceptance_line):
    corpus = connected_atlas()
    mismatches = []
    for idx, G in enumerate(corpus):
        g = Graph.from_edges(G.edges())
        adj = label_adjacency(g)
        c, roles = degree_roles(adj)
        hubs = [i for i in adj if roles[i] == "hub"]
        X0, H0, t0 = simulate_propagation(adj, c, hubs)
        det = OverlappingCommunityDetector()
        try:
            det.fit(g)
        except DegenerateGraphError as exc:  # no hubs: the oracle must agree
            if hubs:
                mismatches.append((idx, repr(exc)))
            continue
        got_roles = {g.labels[i]: det.roles_.role(i).value for i in range(g.n_nodes)}
        X, H = extract(g, det)
        if got_roles != roles or X != X0 or H != H0 or det.propagation_.t_fin != t0:
            mismatches.append(idx)
    ok = acceptance_line(4, not mismatches, f"{len(corpus)} connected graphs with <= 7 nodes, "
                         f"mismatches={mismatches[:10]}")
    assert ok


def test_criterion_5_consistency_oracle(acceptance_line):
    tested, mismatches = 0, []
    for idx, G in enumerate(connected_atlas()):
        g = Graph.from_edges(G.edges())
        adj = label_adjacency(g)
        _, roles = degree_roles(adj)
        if sum(1 for r in roles.values() if r == "hub") < 3:
            continue
        det = OverlappingCommunityDetector().fit(g)
        st, h, lab = det.propagation_, det.hierarchy_, g.labels
        hubs = [lab[i] for i in st.hubs]
        dist = [[bfs_hops(adj, a).get(b, INF) for b in hubs] for a in hubs]
        sets = [{lab[i] for i in st.community_nodes(s)} for s in range(st.n_communities)]
        events = aggregate(sets, dist)
        got = [(m.epsilon, frozenset(h.leaves(m.left)), frozenset(h.leaves(m.right)),
                m.jd_consistent) for m in h.merges]
        expect = phi_from_events(events, len(hubs))
        tested += 1
        if got != events or det.phi_ is None or det.phi_ != pytest.approx(float(max(expect, 0))):
            mismatches.append(idx)
    ok = acceptance_line(5, tested > 0 and not mismatches,
                         f"{tested} graphs with >= 3 hubs, mismatches={mismatches[:10]}")
    assert ok


def test_criterion_6_falsifiability(acceptance_line):
    seeds = np.random.SeedSequence(2024).generate_state(10)
    tic = time.perf_counter()
    hub_fracs, phis = [], []
    for seed in seeds:
        det = OverlappingCommunityDetector().fit(generate_er(500, 0.01, seed=int(seed)))
        hub_fracs.append(det.hub_fraction_)
        phis.append(det.phi_)
    elapsed = time.perf_counter() - tic
    med_hf, med_phi = statistics.median(hub_fracs), statistics.median(phis)
    checks = {"hub_fraction": med_hf >= 2 * DOLPHIN_HUB_FRACTION, "phi": med_phi < 0.5,
              "runtime": elapsed < 30}
    bad = [k for k, ok in checks.items() if not ok]
    ok = acceptance_line(6, not bad, f"median hub fraction {med_hf:.4f} (need >= "
                         f"{2 * DOLPHIN_HUB_FRACTION:.4f}), median phi {med_phi:.4f} (need < 0.5), "
                         f"{elapsed:.1f}s failed={bad}")
    assert ok


def test_criterion_7_disconnected(acceptance_line):
    path = find_dolphins()
    if path is None:
        acceptance_line(7, False, missing_dolphins())
        pytest.fail(missing_dolphins())
    det = OverlappingCommunityDetector().fit(two_copies(load_graph(path)))
    h = det.hierarchy_
    ok = acceptance_line(7, h.truncated_by_disconnection and h.sizes[-1] == 2,
                         f"truncated_by_disconnection={h.truncated_by_disconnection} "
                         f"survivors={h.sizes[-1]}")
    assert ok


def test_criterion_8_scaling(tmp_path, acceptance_line):
    tic = time.perf_counter()
    reports = []
    for n in (400, 4000, 40000):
        path = tmp_path / f"er{n}.txt"
        write_edge_list(generate_er(n, 5.0 / (n - 1), seed=1), path)
        # best of three damps scheduler noise without changing the work done
        runs = [run_pipeline(path) for _ in range(3)]
        reports.append(min(runs, key=lambda r: r.timing["total_seconds"]))
    fit = timing_scaling_report(reports)
    elapsed = time.perf_counter() - tic
    ok = acceptance_line(8, 0.8 <= fit.slope <= 1.3 and elapsed < 300,
                         f"slope {fit.slope:.3f} over E={fit.n_edges} "
                         f"t={[round(s, 3) for s in fit.total_seconds]} ({elapsed:.0f}s total)")
    assert ok


def test_criterion_9_optional_suite(acceptance_line):
    import test_datasets as suite

    found = suite.present_networks()
    lfr = suite.lfr_files()
    problems = []
    for name in found:
        try:
            suite.test_large_network_row(name)
        except AssertionError as exc:
            problems.append(f"{name}: {exc}")
    band = "not asserted"
    if len(found) >= suite.MIN_NETWORKS_FOR_BAND:
        mean = statistics.mean(suite.boundary_fractions(found).values())
        band = f"mean boundary fraction {mean:.3f}"
        if not suite.BOUNDARY_BAND[0] <= mean <= suite.BOUNDARY_BAND[1]:
            problems.append(band)
    for path in lfr:
        try:
            suite.check_lfr(path)
        except AssertionError as exc:
            problems.append(f"{path.name}: {exc}")
    ok = acceptance_line(9, not problems,
                         f"optional 'datasets' suite: {len(found)}/{len(suite.LARGE_NETWORKS)} "
                         f"networks present, {len(lfr)} lfr file(s), band {band}, "
                         f"problems={problems}")
    assert ok
