import argparse
from slimreg.experiments import plot_metrics


def main():
    parser = argparse.ArgumentParser(description="Plots the test accuracy of experiments.")
    parser.add_argument("--logdir", help="Output directory of an experiment", default='runs')
    parser.add_argument("--output", default=None, help="Save the figure to this file instead of showing it")
    args = parser.parse_args()
    plot_metrics(args.logdir, filename=args.output)


if __name__ == "__main__":
    main()
