import json
import os
import random
import traceback
from dataclasses import dataclass, field, replace
import numpy as np
import torch
from slimreg.core import PRECISIONS
from .datasets import DatasetDescriptor, load_idx_dataset, split_low_data, synth_dataset
from .experiment import Experiment
from .metrics import mean_std
from .writer import get_commit_hash

SUMMARY_FILE = 'summary_{}.json'


def seed_everything(seed):
    '''Seed the global generators of random, numpy and torch.'''
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def load_datasets(config, dtype=None):
    '''
    The (train, test) pair described by an ExperimentConfig. The test set is
    normalized with the training set's statistics.
    '''
    if config.dataset == 'idx':
        train = load_idx_dataset(
            DatasetDescriptor(config.train_images, config.train_labels, config.num_classes, config.mean, config.std),
            dtype=dtype,
        )
        test = load_idx_dataset(
            DatasetDescriptor(config.test_images, config.test_labels, train.num_classes, train.mean, train.std),
            dtype=dtype,
        )
        return train, test
    spec = config.synth_spec()
    train = synth_dataset(spec, config.mean, config.std, dtype=dtype)
    test = synth_dataset(replace(spec, n=config.synth_test, seed=config.synth_seed + 1), train.mean, train.std,
                         dtype=dtype)
    return train, test


@dataclass
class ExperimentSummary:
    '''
    Results of every run of an experiment.

    ``runs`` maps a run label to the per-seed results; ``failures`` lists the
    seeds that raised, with the error.
    '''
    runs: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def failed(self):
        return bool(self.failures)

    def statistics(self, label):
        '''Mean and standard deviation over seeds of the final evaluations of one run.'''
        results = self.runs.get(label, [])
        stats = {
            'seeds': [result['seed'] for result in results],
            'top1': _stat([result['top1'] for result in results]),
            'top5': _stat([result['top5'] for result in results]),
        }
        if results and 'fgsm' in results[0]:
            stats['fgsm'] = {
                str(epsilon): _stat([result['fgsm'][epsilon] for result in results])
                for epsilon in results[0]['fgsm']
            }
        if results and 'corruption' in results[0]:
            stats['corruption_mean_error'] = _stat([result['corruption']['mean_error'] for result in results])
        return stats

    def to_dict(self):
        return {
            'commit': get_commit_hash(),
            'runs': {label: self.statistics(label) for label in self.runs},
            'failures': self.failures,
        }

    def write(self, path):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)


def _stat(values):
    mean, std = mean_std(values)
    return {'mean': mean, 'std': std}


def run_seed(config, label, cfg, seed, datasets, make_experiment=Experiment):
    '''Train and evaluate one seed of one run; returns its final evaluations and records.'''
    seed_everything(seed)
    cfg = cfg.replace(seed=seed)
    train, test = datasets
    unlabeled = None
    if config.label_budget > 0:
        train, pool, test = split_low_data(train, test, config.label_budget, seed)
        if config.semi_supervised:
            unlabeled = pool
    experiment = make_experiment(
        label,
        cfg,
        train,
        test,
        os.path.join(config.out, label, 'seed_{}'.format(seed)),
        model=config.model,
        model_options=config.model_options,
        unlabeled=unlabeled,
        checkpoint=config.checkpoint,
        quiet=config.quiet,
        write_loss=config.write_loss,
        wall_time=config.wall_time,
    )
    try:
        records = experiment.train()
        results = experiment.test(config.suite, config.epsilons, config.corruptions, config.severities)
    finally:
        experiment.close()
    results['seed'] = seed
    results['records'] = records
    return results


def run_experiment(config, make_experiment=Experiment):
    '''
    Run every (run, seed) pair of an experiment and write ``<out>/summary_<kind>.json``;
    experiments of different kinds can share an output directory.

    A seed that raises is recorded as a failure and the remaining seeds still run.

    Args:
        config (ExperimentConfig): The experiment.
        make_experiment (callable): Experiment constructor.

    Returns:
        ExperimentSummary: Per-seed results and failures.
    '''
    os.makedirs(config.out, exist_ok=True)
    summary = ExperimentSummary()
    datasets = {}
    for label, cfg in config.runs():
        summary.runs[label] = []
        for seed in config.seeds:
            try:
                dtype = PRECISIONS[cfg.precision]
                if dtype not in datasets:
                    datasets[dtype] = load_datasets(config, dtype)
                summary.runs[label].append(run_seed(config, label, cfg, seed, datasets[dtype], make_experiment))
            except Exception as error:  # pylint: disable=broad-except
                summary.failures.append({
                    'label': label,
                    'seed': seed,
                    'error': '{}: {}'.format(type(error).__name__, error),
                })
                if not config.quiet:
                    traceback.print_exc()
    summary.write(os.path.join(config.out, SUMMARY_FILE.format(config.kind)))
    return summary
