#!/usr/bin/env python3
"""Convert a raw UPFD directory into the three text files read by `structprobe ingest`.

Expected input files (as distributed with the UPFD raw data):
  A.txt                     comma-separated global edge list "u, v"
  node_graph_id.npy         graph index of every node
  graph_labels.npy          label of every graph
  new_<feature>_feature.npz scipy sparse node-feature matrix

The news (root) node of each graph has the smallest global id, which is also
ingest's default root, so no roots file is written.
"""

import argparse
import pathlib

import numpy as np
import scipy.sparse as sp


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("raw_dir", type=pathlib.Path)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--feature", default="bert", help="profile | spacy | bert | content")
    args = parser.parse_args()

    raw = args.raw_dir
    node_graph = np.load(raw / "node_graph_id.npy")
    labels = np.load(raw / "graph_labels.npy")
    features = sp.load_npz(raw / f"new_{args.feature}_feature.npz").toarray()
    edges = np.loadtxt(raw / "A.txt", delimiter=",", dtype=np.int64, ndmin=2)
    if features.shape[0] != node_graph.shape[0]:
        raise SystemExit(f"{features.shape[0]} feature rows for {node_graph.shape[0]} nodes")

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "labels.txt", "w") as f:
        for g, label in enumerate(labels):
            f.write(f"g{g} {int(label)}\n")
    with open(out / "features.txt", "w") as f:
        for node, (g, row) in enumerate(zip(node_graph, features)):
            f.write(f"g{int(g)} {node} " + " ".join(repr(float(np.float32(v))) for v in row) + "\n")
    with open(out / "edges.txt", "w") as f:
        for u, v in edges:
            if node_graph[u] != node_graph[v]:
                raise SystemExit(f"edge {u}-{v} crosses graphs")
            f.write(f"g{int(node_graph[u])} {u} {v}\n")


if __name__ == "__main__":
    main()
