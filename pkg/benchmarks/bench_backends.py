"""Compare the numba and pure-numpy enumeration backends on vertex and SOS lattices.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import os
import time

import numpy as np

from vertexlab.kernels import enumerate_sum
from vertexlab.numerics import ModelParams
from vertexlab.sos_weights import SosLatticeSpec, plain_face_model, random_boundary_walk
from vertexlab.vertex_lattice import VertexLatticeSpec, build_factor_graph


def vertex_graph(n_cols, n_rows):
    bnd = {"top": [0] * n_cols, "bottom": [0] * n_cols, "left": [0] * n_rows, "right": [0] * n_rows}
    lams = [0.1 * k - 0.05j for k in range(max(n_cols, n_rows))]
    spec = VertexLatticeSpec(n_cols, n_rows, lams[:n_cols], lams[:n_rows], bnd, ModelParams())
    return build_factor_graph(spec)


def sos_graph(n_cols, n_rows):
    rng = np.random.default_rng(3)
    walk = random_boundary_walk(n_cols, n_rows, rng)
    spec = SosLatticeSpec(n_cols, n_rows, [0.2] * n_cols, [-0.1j] * n_rows, walk, ModelParams())
    return plain_face_model(spec).graph


def timed(graph, backend, repeat):
    os.environ["VERTEXLAB_BACKEND"] = backend
    value = enumerate_sum(graph)  # compiles the numba kernel on first use
    start = time.perf_counter()
    for _ in range(repeat):
        enumerate_sum(graph)
    return value, (time.perf_counter() - start) / repeat


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cases = [
        ("vertex 2x2 summed", vertex_graph(2, 2)),
        ("vertex 3x2 summed", vertex_graph(3, 2)),
        ("vertex 3x3 summed", vertex_graph(3, 3)),
        ("sos 3x3 fixed", sos_graph(3, 3)),
        ("sos 4x4 fixed", sos_graph(4, 4)),
    ]
    print(f"{'case':<20}{'free':>6}{'numba s':>12}{'numpy s':>12}{'speedup':>10}{'agree':>8}")
    for name, graph in cases:
        v_nb, t_nb = timed(graph, "numba", args.repeat)
        v_np, t_np = timed(graph, "numpy", args.repeat)
        agree = abs(v_nb - v_np) <= 1e-10 * (1 + abs(v_nb))
        print(f"{name:<20}{graph.n_free():>6}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{str(agree):>8}")


if __name__ == "__main__":
    main()
