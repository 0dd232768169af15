"""Pipeline ordering returns the classical result bit for bit.

For each method, runs the classical ordering and then the pipeline ordering
with several block counts, comparing every recorded interface trace.  The
point of the pipeline ordering is concurrency, not a new discretization, so
the results must be identical.
"""

import numpy as np

from pipewr import (
    DnwrConfig,
    DnwrMode,
    NnwrConfig,
    build_grid,
    model_problem,
    run_classical,
    run_dnwr,
    run_pipeline,
)


def main():
    problem = model_problem()
    grid = build_grid(1.0, 0.1, 63, 64)
    N, K = 4, 3

    ref = run_classical(problem, grid, N, NnwrConfig(K=K, tol=0.0))
    print(f"two-stage method, N={N}, K={K}")
    for J in (1, 4, 8, 16):
        pipe = run_pipeline(problem, grid, N, NnwrConfig(K=K, tol=0.0), J)
        diff = max(float(np.max(np.abs(s - pipe.traces[key])))
                   for key, s in ref.traces.items())
        msgs = pipe.counters["data_messages"]
        print(f"  J={J:3d}: max diff {diff:.1e}, {msgs} data messages "
              f"({pipe.counters['data_words']} words)")

    dref = run_dnwr(problem, grid, N, DnwrConfig(K=K, tol=0.0))
    print(f"\none-stage method, N={N}, K={K}")
    for J in (8, 16, 32):
        pipe = run_dnwr(problem, grid, N,
                        DnwrConfig(K=K, tol=0.0, mode=DnwrMode.PIPELINE), J=J)
        diff = max(float(np.max(np.abs(s - pipe.traces[key])))
                   for key, s in dref.traces.items())
        msgs = pipe.counters["data_messages"]
        print(f"  J={J:3d}: max diff {diff:.1e}, {msgs} data messages "
              f"({pipe.counters['data_words']} words)")


if __name__ == "__main__":
    main()
