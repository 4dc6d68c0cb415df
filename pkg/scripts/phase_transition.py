"""Success rate (relative error <= 1e-3) over sample size and sparsity."""
from _common import run


def main():
    spec, _, summaries = run("phase_transition", __doc__)
    for method in spec.methods:
        print(f"# {method}: rows s, columns m")
        print("s\\m," + ",".join(str(m) for m in spec.m))
        for s in spec.s:
            rate = {g.m: g.success_rate for g in summaries if g.method == method and g.s == s}
            print(f"{s}," + ",".join(f"{rate[m]:.2f}" for m in spec.m))


if __name__ == "__main__":
    main()
