import os
import numpy as np
import matplotlib.pyplot as plt
from .metrics import METRICS_FILE, read_metrics


def load_metrics_data(out_dir, split='test'):
    '''
    Test top-1 per epoch for every run under ``out_dir``.

    Expects the layout written by run_experiment, <out_dir>/<run>/seed_<s>/metrics.csv.

    Returns:
        dict: run label -> [epochs, seeds] array of top-1 accuracies, truncated
        to the shortest seed.
    '''
    data = {}
    for label in sorted(os.listdir(out_dir)):
        run_path = os.path.join(out_dir, label)
        if not os.path.isdir(run_path):
            continue
        curves = []
        for seed_dir in sorted(os.listdir(run_path)):
            path = os.path.join(run_path, seed_dir, METRICS_FILE)
            if os.path.exists(path):
                curves.append([record.top1 for record in read_metrics(path) if record.split == split])
        curves = [curve for curve in curves if curve]
        if curves:
            length = min(len(curve) for curve in curves)
            data[label] = np.array([curve[:length] for curve in curves]).T
    return data


def plot_metrics(out_dir, filename=None):
    '''
    Plot mean test top-1 (shaded by one standard deviation over seeds) against
    the epoch for every run of an experiment. Shows the figure, or saves it to
    ``filename``.
    '''
    data = load_metrics_data(out_dir)
    fig, ax = plt.subplots()
    for label, accuracies in data.items():
        epochs = np.arange(len(accuracies))
        mean = accuracies.mean(axis=1)
        std = accuracies.std(axis=1)
        line, = ax.plot(epochs, mean, label=label)
        ax.fill_between(epochs, mean + std, mean - std, alpha=0.2, color=line.get_color())
    ax.set_xlabel("epoch")
    ax.set_ylabel("test top-1 (%)")
    ax.set_title(os.path.basename(os.path.normpath(out_dir)))
    if data:
        ax.legend(loc="lower right")
    if filename is None:
        plt.show()
    else:
        fig.savefig(filename)
    plt.close(fig)
    return data
