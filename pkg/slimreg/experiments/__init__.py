from .datasets import (
    DatasetDescriptor,
    ImageDataset,
    SynthSpec,
    load_idx_dataset,
    read_idx_images,
    read_idx_labels,
    split_low_data,
    synth_ceiling,
    synth_dataset,
    synth_pixels,
    write_idx,
)
from .config import DATASETS, SUITES, ExperimentConfig, load_config, parse_config
from .metrics import METRICS_FILE, emit_metrics, mean_std, read_metrics, summarize_records
from .writer import ExperimentWriter
from .experiment import Experiment
from .run_experiment import ExperimentSummary, load_datasets, run_experiment, run_seed, seed_everything
from .plots import load_metrics_data, plot_metrics
from .selftest import CheckResult, run_selftest

__all__ = [
    'DatasetDescriptor',
    'ImageDataset',
    'SynthSpec',
    'load_idx_dataset',
    'read_idx_images',
    'read_idx_labels',
    'split_low_data',
    'synth_ceiling',
    'synth_dataset',
    'synth_pixels',
    'write_idx',
    'DATASETS',
    'SUITES',
    'ExperimentConfig',
    'load_config',
    'parse_config',
    'METRICS_FILE',
    'emit_metrics',
    'mean_std',
    'read_metrics',
    'summarize_records',
    'ExperimentWriter',
    'Experiment',
    'ExperimentSummary',
    'load_datasets',
    'run_experiment',
    'run_seed',
    'seed_everything',
    'load_metrics_data',
    'plot_metrics',
    'CheckResult',
    'run_selftest',
]
