"""Seconds to relative error 1e-3, averaged over successful trials only."""
from _common import run


def main():
    _, _, summaries = run("timing", __doc__)
    print("method,n,m,s,successes,trials,mean_seconds")
    for g in sorted(summaries, key=lambda g: (g.method, g.n, g.m, g.s)):
        secs = "" if g.mean_seconds is None else f"{g.mean_seconds:.4f}"
        print(f"{g.method},{g.n},{g.m},{g.s},{g.successes},{g.trials},{secs}")


if __name__ == "__main__":
    main()
