import csv
import os
import subprocess
from tensorboardX import SummaryWriter
from slimreg.logging import Writer
from .metrics import METRICS_FILE, emit_metrics


class ExperimentWriter(SummaryWriter, Writer):
    '''
    The Writer used by slimreg.experiments.Experiment.

    Writes tensorboard logs into ``log_dir``, appends every MetricsRecord to
    ``<log_dir>/metrics.csv`` and summary statistics to ``<log_dir>/<name>.csv``.

    Args:
        experiment (slimreg.experiments.Experiment): Provides the "step" and "epoch" counters.
        log_dir (str): Directory of this run.
        loss (bool, optional): Whether to log losses and schedules, or only evaluations and summaries.
    '''
    def __init__(self, experiment, log_dir, loss=True):
        os.makedirs(log_dir, exist_ok=True)
        self.log_dir = log_dir
        self.metrics_file = os.path.join(log_dir, METRICS_FILE)
        self._experiment = experiment
        self._loss = loss
        super().__init__(log_dir=log_dir)

    def add_loss(self, name, value, step="step"):
        if self._loss:
            self.add_scalar("loss/" + name, value, step)

    def add_evaluation(self, name, value, step="epoch"):
        self.add_scalar("evaluation/" + name, value, step)

    def add_schedule(self, name, value, step="step"):
        if self._loss:
            self.add_scalar("schedule/" + name, value, step)

    def add_scalar(self, name, value, step="step"):  # pylint: disable=arguments-differ
        super().add_scalar(name, value, self._get_step(step))

    def add_summary(self, name, mean, std, step="epoch"):
        self.add_evaluation(name + "/mean", mean, step)
        self.add_evaluation(name + "/std", std, step)
        path = os.path.join(self.log_dir, name + ".csv")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "a", newline='') as csvfile:
            csv.writer(csvfile).writerow([self._get_step(step), mean, std])

    def add_record(self, record):
        emit_metrics([record], self.metrics_file)

    def _get_step(self, _type):
        if _type == "step":
            return self._experiment.step
        if _type == "epoch":
            return self._experiment.epoch
        return _type


def get_commit_hash():
    '''Short hash of the git commit of the working directory, or "" outside a repository.'''
    try:
        result = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            check=False
        )
    except OSError:
        return ""
    return result.stdout.decode("utf-8").rstrip()
