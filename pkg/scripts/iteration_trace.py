"""Mean relative error per iteration for HTP and IHT from the same starts."""
from _common import run


def main():
    _, _, summaries = run("iteration_trace", __doc__)
    curves = {g.method: g.error_curve for g in summaries}
    length = max(len(c) for c in curves.values())
    methods = sorted(curves)
    print("k," + ",".join(methods))
    for k in range(length):
        row = [curves[mm][min(k, len(curves[mm]) - 1)] for mm in methods]
        print(f"{k}," + ",".join(f"{v:.3e}" for v in row))


if __name__ == "__main__":
    main()
