"""Iterations HTP needs to reach relative error 1e-10, by sparsity.

Pass ``--config configs/iteration_counts_by_m.cfg`` for the sweep over m.
"""
from _common import run


def main():
    _, records, summaries = run("iteration_counts", __doc__)
    print("n,m,s,trials,converged,mean_iterations,max_iterations_converged")
    for g in summaries:
        conv = [r.iterations for r in records
                if (r.n, r.m, r.s, r.method) == (g.n, g.m, g.s, g.method) and r.relative_error <= 1e-10]
        top = max(conv) if conv else ""
        print(f"{g.n},{g.m},{g.s},{g.trials},{len(conv)},{g.mean_iterations:.2f},{top}")


if __name__ == "__main__":
    main()
