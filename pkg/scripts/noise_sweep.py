"""Final relative error of HTP against the noise level sigma."""
from _common import run


def main():
    _, _, summaries = run("noise_sweep", __doc__)
    print("sigma,trials,success_rate,mean_relative_error,log_mean_relative_error")
    for g in sorted(summaries, key=lambda g: g.sigma):
        print(f"{g.sigma},{g.trials},{g.success_rate:.2f},{g.mean_relative_error:.4e},{g.log_mean_relative_error:.4f}")


if __name__ == "__main__":
    main()
