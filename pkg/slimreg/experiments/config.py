import sys
from dataclasses import dataclass, field, fields, replace
from slimreg.core import ConfigError
from slimreg.evaluation import DEFAULT_EPSILONS, SEVERITIES
from slimreg.nn import MODELS
from slimreg.presets import KINDS, SEMI_SUPERVISED, train_config
from slimreg.trainer import TrainConfig
from slimreg.transforms import CORRUPTIONS
from .datasets import SynthSpec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SUITES = ('clean', 'fgsm', 'corruption')
DATASETS = ('synthetic', 'idx')


@dataclass(frozen=True)
class ExperimentConfig:
    '''
    One experiment: a kind of training run repeated over seeds, its data and its evaluation.

    Args:
        kind (str): Experiment kind, see slimreg.presets.KINDS.
        train (TrainConfig): Training configuration; defaults to the kind's preset.
        model (str): Architecture preset name.
        model_options (dict): Extra arguments of the architecture preset.
        dataset (str): "synthetic" or "idx".
        train_images, train_labels, test_images, test_labels (str): IDX files.
        num_classes (int): Class count of IDX data (inferred if omitted).
        mean, std (tuple): Per-channel normalization of IDX data.
        synth_classes, synth_train, synth_test, synth_size, synth_channels,
        synth_seed: Shape and seed of synthetic data.
        synth_noise, synth_distractor, synth_confusion: Difficulty of synthetic
            data, see slimreg.experiments.SynthSpec.
        label_budget (int): If > 0, train on this many class-uniform labels.
        unlabeled (bool): Use the remaining training images as an unlabeled pool.
        suite (tuple): Final evaluations among "clean", "fgsm", "corruption".
        epsilons (tuple): FGSM perturbation sizes.
        corruptions (tuple): Corruption kinds.
        severities (tuple): Corruption severities.
        out (str): Output directory.
        seeds (tuple): One run per seed.
        sweep_subnets (tuple): Repeat the experiment for each number of sub-networks.
        sweep_lower_bound (tuple): Repeat the experiment for each width lower bound.
        checkpoint (bool): Save a checkpoint after every epoch.
        quiet (bool): Do not print progress.
        write_loss (bool): Log training losses and schedules, not only evaluations.
        wall_time (bool): Store epoch durations in metrics.csv. Reruns then no
            longer produce identical files.
    '''
    kind: str = 'gradaug'
    train: TrainConfig = None
    model: str = 'small_cnn'
    model_options: dict = field(default_factory=dict)
    dataset: str = 'synthetic'
    train_images: str = None
    train_labels: str = None
    test_images: str = None
    test_labels: str = None
    num_classes: int = None
    mean: tuple = None
    std: tuple = None
    synth_classes: int = 10
    synth_train: int = 1000
    synth_test: int = 500
    synth_size: int = 32
    synth_channels: int = 3
    synth_seed: int = 0
    synth_noise: float = 0.12
    synth_distractor: float = 0.6
    synth_confusion: float = 0.03
    label_budget: int = 0
    unlabeled: bool = False
    suite: tuple = ('clean',)
    epsilons: tuple = DEFAULT_EPSILONS
    corruptions: tuple = CORRUPTIONS
    severities: tuple = SEVERITIES
    out: str = 'runs'
    seeds: tuple = (0,)
    sweep_subnets: tuple = field(default_factory=tuple)
    sweep_lower_bound: tuple = field(default_factory=tuple)
    checkpoint: bool = True
    quiet: bool = False
    write_loss: bool = True
    wall_time: bool = False

    def __post_init__(self):
        for name in ('suite', 'epsilons', 'corruptions', 'severities', 'seeds', 'sweep_subnets',
                     'sweep_lower_bound'):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for name in ('mean', 'std'):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.kind not in KINDS:
            raise ConfigError("unknown experiment kind {!r}".format(self.kind))
        if self.train is None:
            object.__setattr__(self, 'train', train_config(self.kind))
        if self.model not in MODELS:
            raise ConfigError("unknown model {!r}, expected one of {}".format(self.model, sorted(MODELS)))
        if self.dataset not in DATASETS:
            raise ConfigError("dataset must be one of {}".format(DATASETS))
        if self.dataset == 'idx' and None in (self.train_images, self.train_labels, self.test_images,
                                              self.test_labels):
            raise ConfigError("idx datasets need train_images, train_labels, test_images and test_labels")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if any(suite not in SUITES for suite in self.suite):
            raise ConfigError("suite entries must be among {}".format(SUITES))
        if self.label_budget < 0:
            raise ConfigError("label_budget must be >= 0")
        if self.dataset == 'synthetic':
            self.synth_spec()
            if self.label_budget > self.synth_train:
                raise ConfigError("label_budget {} exceeds the {} training samples".format(
                    self.label_budget, self.synth_train))
        if any(epsilon < 0 for epsilon in self.epsilons):
            raise ConfigError("epsilons must be >= 0")
        if any(kind not in CORRUPTIONS for kind in self.corruptions):
            raise ConfigError("corruptions must be among {}".format(CORRUPTIONS))
        if any(not 0 <= severity <= 5 for severity in self.severities):
            raise ConfigError("severities must lie in 0..5")

    def synth_spec(self):
        '''The SynthSpec of the synthetic training set.'''
        return SynthSpec(
            classes=self.synth_classes,
            n=self.synth_train,
            height=self.synth_size,
            width=self.synth_size,
            channels=self.synth_channels,
            seed=self.synth_seed,
            noise=self.synth_noise,
            distractor=self.synth_distractor,
            confusion=self.synth_confusion,
        )

    @property
    def semi_supervised(self):
        return self.unlabeled or self.kind in SEMI_SUPERVISED

    def runs(self):
        '''
        (label, TrainConfig) for every point of the sweep grid; a single run
        labelled with the kind when nothing is swept.
        '''
        subnets = self.sweep_subnets or (None,)
        lower_bounds = self.sweep_lower_bound or (None,)
        runs = []
        for n in subnets:
            for alpha in lower_bounds:
                label, changes = self.kind, {}
                if n is not None:
                    label += '_n{}'.format(n)
                    changes['subnets'] = n
                if alpha is not None:
                    label += '_a{}'.format(alpha)
                    changes['lower_bound'] = alpha
                runs.append((label, self.train.replace(**changes)))
        return runs

    def replace(self, **changes):
        return replace(self, **changes)

    @classmethod
    def keys(cls):
        return tuple(f.name for f in fields(cls) if f.name != 'train')


def parse_config(settings):
    '''
    Build an ExperimentConfig from a flat mapping of settings.

    Keys name ExperimentConfig or TrainConfig fields; the TrainConfig fields
    override the defaults of the experiment kind.

    Raises:
        ConfigError: A key is unknown or a value is invalid.
    '''
    experiment_keys, train_keys = set(ExperimentConfig.keys()), set(TrainConfig.keys())
    unknown = sorted(set(settings) - experiment_keys - train_keys)
    if unknown:
        raise ConfigError("unknown configuration keys: {}".format(', '.join(unknown)))
    experiment = {key: value for key, value in settings.items() if key in experiment_keys}
    train = {key: value for key, value in settings.items() if key in train_keys}
    kind = experiment.get('kind', 'gradaug')
    try:
        return ExperimentConfig(train=train_config(kind, **train), **experiment)
    except TypeError as error:
        raise ConfigError(str(error)) from error


def load_config(path, **overrides):
    '''Read a TOML experiment file; ``overrides`` take precedence over its values.'''
    try:
        with open(path, 'rb') as f:
            settings = tomllib.load(f)
    except OSError as error:
        raise ConfigError("cannot read {}: {}".format(path, error)) from error
    except tomllib.TOMLDecodeError as error:
        raise ConfigError("{}: {}".format(path, error)) from error
    nested = [key for key, value in settings.items() if isinstance(value, dict) and key != 'model_options']
    if nested:
        raise ConfigError("configuration files are flat, found tables: {}".format(', '.join(nested)))
    settings.update(overrides)
    return parse_config(settings)
