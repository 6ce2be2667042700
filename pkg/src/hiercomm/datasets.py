"""Locating benchmark networks on disk.

Only the karate club network ships with the package. Other networks are
looked up by name in ``$HIERCOMM_DATA_DIR`` (or an explicit directory) as
``<name>.txt``, ``<name>.txt.gz``, ``<name>.edges``, ``<name>.csv`` (comma
separated, one header line) or ``<name>.gml``.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .graph import Graph, load_edge_list

DATA_DIR_ENV = "HIERCOMM_DATA_DIR"
_SUFFIXES = (".txt", ".txt.gz", ".edges", ".edgelist", ".csv", ".gml")


def karate_club() -> Graph:
    with resources.files("hiercomm").joinpath("data/karate.txt").open() as fh:
        return load_edge_list(fh)


def data_dirs(data_dir=None) -> list:
    dirs = []
    if data_dir is not None:
        dirs.append(Path(data_dir))
    if os.environ.get(DATA_DIR_ENV):
        dirs.append(Path(os.environ[DATA_DIR_ENV]))
    return dirs


def find_dataset(name: str, data_dir=None) -> Path | None:
    for d in data_dirs(data_dir):
        for suffix in ("",) + _SUFFIXES:
            path = d / f"{name}{suffix}"
            if path.is_file():
                return path
    return None


def read_gml(path) -> Graph:
    import networkx as nx

    return Graph.from_edges(nx.read_gml(path, label="id").edges())


def load_graph(path) -> Graph:
    """Load an edge list, a headered CSV edge list or a GML file, by suffix."""
    if str(path).endswith(".gml"):
        return read_gml(path)
    if str(path).endswith((".csv", ".csv.gz")):
        return load_edge_list(path, delimiter=",", header=True)
    return load_edge_list(path)


def load_dataset(name: str, data_dir=None) -> Graph:
    if name == "karate" and find_dataset(name, data_dir) is None:
        return karate_club()
    path = find_dataset(name, data_dir)
    if path is None:
        where = ", ".join(map(str, data_dirs(data_dir))) or f"(set ${DATA_DIR_ENV})"
        raise FileNotFoundError(f"dataset {name!r} not found in {where}")
    return load_graph(path)
