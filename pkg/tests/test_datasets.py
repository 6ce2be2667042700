"""Optional checks on external networks found under ``$HIERCOMM_DATA_DIR``.

Nothing here downloads data. Each network is looked up under the usual
SNAP / MUSAE file names; absent files skip their test.
"""

import statistics

import pytest

from hiercomm import OverlappingCommunityDetector
from hiercomm.datasets import data_dirs, find_dataset, load_graph
from oracles import INF, aggregate, bfs_hops, phi_from_events, simulate_propagation

pytestmark = pytest.mark.datasets

# name: (file stems, N, E, hub, boundary, isolated, leaf, inner)
LARGE_NETWORKS = {
    "facebook-users": (("facebook_combined",), 4039, 88234, 5, 621, 0, 75, 3338),
    "enron-email": (("email-Enron",), 36692, 183831, 483, 8640, 530, 11211, 15828),
    "brightkite": (("loc-brightkite_edges", "brightkite"), 58228, 214078, 682, 12259, 49, 21157, 24081),
    "ca-grqc": (("CA-GrQc", "ca-GrQc"), 5241, 14484, 298, 851, 185, 1197, 2710),
    "ca-hepth": (("CA-HepTh", "ca-HepTh"), 9875, 25973, 341, 2123, 184, 2109, 5118),
    "ca-hepph": (("CA-HepPh", "ca-HepPh"), 12006, 118489, 172, 2605, 170, 1493, 7566),
    "ca-astroph": (("CA-AstroPh", "ca-AstroPh"), 18771, 198050, 185, 3909, 281, 1282, 13114),
    "ca-condmat": (("CA-CondMat", "ca-CondMat"), 23133, 93439, 442, 4717, 447, 2373, 15154),
    "deezer-ro": (("RO_edges", "deezer_RO"), 41773, 125826, 1051, 9221, 5, 5430, 26066),
    "deezer-hu": (("HU_edges", "deezer_HU"), 47538, 222887, 450, 10494, 0, 2701, 33893),
    "deezer-hr": (("HR_edges", "deezer_HR"), 54573, 498202, 64, 11035, 1, 2330, 41143),
    "fb-artist": (("artist_edges",), 50515, 819090, 30, 14570, 0, 3124, 32791),
    "fb-new-sites": (("new_sites_edges",), 27917, 205964, 179, 7762, 0, 2137, 17839),
    "fb-company": (("company_edges",), 14113, 52126, 341, 3602, 3, 2358, 7809),
    "fb-athletes": (("athletes_edges",), 13866, 86811, 43, 4715, 0, 1240, 7868),
    "fb-government": (("government_edges",), 7057, 89429, 15, 1894, 0, 355, 4793),
    "fb-politician": (("politician_edges",), 5908, 41706, 60, 1845, 0, 600, 3403),
    "fb-public-figure": (("public_figure_edges",), 11565, 67038, 129, 3239, 0, 1912, 6285),
    "fb-tv-show": (("tvshow_edges",), 3892, 17239, 153, 997, 0, 611, 2131),
    "gowalla": (("loc-gowalla_edges", "gowalla"), 196591, 950327, 1266, 49295, 9, 49452, 96569),
    "amazon": (("com-amazon.ungraph", "amazon"), 334863, 925872, 17837, 120277, 71, 25709, 170969),
    "dblp": (("com-dblp.ungraph", "dblp"), 317080, 1049866, 2965, 68403, 1, 43181, 202530),
}

BOUNDARY_BAND = (0.25 - 0.065, 0.25 + 0.065)
MIN_NETWORKS_FOR_BAND = 3


def locate(stems):
    for stem in stems:
        path = find_dataset(stem)
        if path is not None:
            return path
    return None


def present_networks():
    return {name: path for name, row in LARGE_NETWORKS.items()
            if (path := locate(row[0])) is not None}


def lfr_files():
    out = []
    for d in data_dirs():
        out += sorted(p for p in d.glob("lfr*") if p.is_file())
    return out


def boundary_fractions(networks):
    fracs = {}
    for name, path in networks.items():
        det = OverlappingCommunityDetector().fit(load_graph(path))
        fracs[name] = det.roles_.counts["boundary"] / det.graph_.n_nodes
    return fracs


@pytest.mark.parametrize("name", sorted(LARGE_NETWORKS))
def test_large_network_row(name):
    stems, n, e, hub, boundary, isolated, leaf, inner = LARGE_NETWORKS[name]
    path = locate(stems)
    if path is None:
        pytest.skip(f"{name}: none of {stems} found in {data_dirs() or 'no data directory'}")
    det = OverlappingCommunityDetector().fit(load_graph(path))
    g = det.graph_
    assert (g.n_nodes, g.n_edges) == (n, e)
    c = det.roles_.counts
    assert (c["hub"], c["boundary"], c["isolated"], c["leaf"], c["inner"]) == \
        (hub, boundary, isolated, leaf, inner)
    assert det.metrics_.identity_holds()


def test_boundary_fraction_band():
    found = present_networks()
    if len(found) < MIN_NETWORKS_FOR_BAND:
        pytest.skip(f"{len(found)} large network(s) present; band needs {MIN_NETWORKS_FOR_BAND}")
    mean = statistics.mean(boundary_fractions(found).values())
    assert BOUNDARY_BAND[0] <= mean <= BOUNDARY_BAND[1]


def check_lfr(path):
    """Identity, propagation-oracle and consistency-oracle checks on one graph."""
    det = OverlappingCommunityDetector().fit(load_graph(path))
    g, st = det.graph_, det.propagation_
    assert det.metrics_.identity_holds()
    lab = g.labels
    adj = {lab[i]: {lab[j] for j in g.neighbors(i)} for i in range(g.n_nodes)}
    c = {lab[i]: int(g.degree[i]) for i in range(g.n_nodes)}
    hubs = [lab[i] for i in st.hubs]
    X0, H0, t_fin = simulate_propagation(adj, c, hubs)
    X = {lab[st.hubs[s]]: {(lab[i], t) for i, t in st.community(s)} for s in range(st.n_communities)}
    assert X == X0 and st.t_fin == t_fin
    dist = [[bfs_hops(adj, a).get(b, INF) for b in hubs] for a in hubs]
    sets = [{lab[i] for i in st.community_nodes(s)} for s in range(st.n_communities)]
    events = aggregate(sets, dist)
    assert [m.jd_consistent for m in det.hierarchy_.merges] == [e[3] for e in events]
    expect = phi_from_events(events, len(hubs))
    if not det.hierarchy_.truncated_by_disconnection:
        assert (det.phi_ is None and expect is None) or det.phi_ == pytest.approx(float(expect))
    return det


def test_lfr_properties():
    files = lfr_files()
    if not files:
        pytest.skip("no lfr* file in the data directory")
    for path in files:
        check_lfr(path)
