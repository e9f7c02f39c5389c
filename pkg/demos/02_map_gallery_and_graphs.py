"""The built-in map families and their index graphs.

Every mapping carries a directed graph on coordinate indices: an edge from
(k,l) to (i,j) says that output coordinate (k,l) blows up when input
coordinate (i,j) alone grows without bound.  For a linear map this recovers
the adjacency pattern of its matrix, for the singular-pair map the bipartite
biadjacency.  The graph feeds the existence condition for positive
eigenvectors of non-expansive maps, which is weaker than strong connectivity
once there is more than one block.
"""

import numpy as np

from mhspectral import (
    build_dual_graph,
    build_graph,
    check_existence_condition,
    is_strongly_connected,
    linear_map,
    max_example_map,
    nonirr_map,
    singular_map,
    verify_multihomogeneous,
    verify_order_preserving,
)


def show(F, note=""):
    g = build_graph(F)
    print(f"--- {F.label} {note}")
    print("A =")
    print(np.asarray(F.A))
    print("edges:")
    print(g.to_text())
    print("strongly connected:   ", is_strongly_connected(g))
    print("existence condition:  ", check_existence_condition(g))
    print()


M = np.array([[0.0, 1.0, 0.5], [1.0, 0.0, 0.0], [0.0, 2.0, 1.0]])
show(linear_map(M), "(graph = adjacency pattern of M)")

R = np.array([[1.0, 0.0], [0.5, 2.0]])
show(singular_map(R), "(bipartite biadjacency)")

# a strongly connected graph does NOT imply a unique eigenvector: every
# (1, b, c) with b, c in [eps, 1] is fixed by the max example
show(max_example_map(0.3))

# ...and the existence condition does NOT require strong connectivity: the
# cross-block max map satisfies it although block 0 never reaches block 1
F = nonirr_map()
show(F, "(condition holds, strong connectivity fails)")

gd = build_dual_graph(F)
print("dual graph of", F.label, "(vanishing limits as t -> 0):")
print(gd.to_text())
print("-> exactly the two self-loops on block 0\n")

# structure audits: declared homogeneity matrix and order preservation
for G in (linear_map(M), singular_map(R), max_example_map(0.3)):
    mh = verify_multihomogeneous(G, samples=300)
    op = verify_order_preserving(G, samples=300)
    print(f"{G.label:24s} multi-homogeneous: {mh.passed}   order-preserving: {op.passed}")
