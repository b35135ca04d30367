from dataclasses import dataclass, field, fields, replace
from slimreg.core import ConfigError, PRECISIONS
from slimreg.optim import OPTIMIZERS, Schedule
from slimreg.transforms import MIX_METHODS

SUBNET_MODES = ('width', 'depth', 'full')


@dataclass(frozen=True)
class TrainConfig:
    '''
    Everything that determines how a model is trained.

    Args:
        subnets (int): Sub-networks trained per step (0 gives standard training).
        lower_bound (float): Smallest sub-network width.
        subnet_mode (str): "width" samples widths, "depth" samples residual-block
            masks, "full" reuses the full network on transformed inputs.
        width_grid (tuple): If non-empty, widths are drawn from this grid.
        final_survival (float): Survival probability of the last residual block
            for depth sampling and drop_path.
        drop_path (bool): Train the full network itself with stochastic depth.
        scale_set (tuple): Input resolutions a sub-network may see.
        rotation (bool): Give sub-networks randomly rotated inputs.
        mix (str): Batch augmentation of the full network: none, mixup or cutmix.
        mix_prob (float): Probability that the batch augmentation is applied.
        mix_beta (float): Lambda ~ Beta(mix_beta, mix_beta).
        always_smallest (bool): Always train the sub-network at the lower bound.
        soft_label (bool): Train sub-networks on the full network's predictions.
        optimizer (str): "sgd" or "adam".
        lr (float): Initial learning rate.
        momentum (float): SGD momentum.
        weight_decay (float): L2 coefficient.
        decay_norm (bool): Apply weight decay to batch norm parameters and biases.
        schedule (str): "cosine", "step" or "constant".
        milestones (tuple): Epochs where the step schedule decays.
        gamma (float): Step schedule decay factor.
        epochs (int): Passes over the training data.
        batch_size (int): Labeled samples per step.
        unlabeled_batch_size (int, optional): Unlabeled samples per semi-supervised
            step. Follows batch_size unless set.
        seed (int): Seeds every random stream of the run.
        precision (str): "single" or "double".
    '''
    subnets: int = 3
    lower_bound: float = 0.9
    subnet_mode: str = 'width'
    width_grid: tuple = field(default_factory=tuple)
    final_survival: float = 0.5
    drop_path: bool = False
    scale_set: tuple = field(default_factory=tuple)
    rotation: bool = False
    mix: str = 'none'
    mix_prob: float = 1.
    mix_beta: float = 1.
    always_smallest: bool = True
    soft_label: bool = True
    optimizer: str = 'sgd'
    lr: float = 0.1
    momentum: float = 0.9
    weight_decay: float = 5e-4
    decay_norm: bool = True
    schedule: str = 'cosine'
    milestones: tuple = field(default_factory=tuple)
    gamma: float = 0.1
    epochs: int = 10
    batch_size: int = 64
    unlabeled_batch_size: int = None
    seed: int = 0
    precision: str = 'single'

    def __post_init__(self):
        for name in ('width_grid', 'scale_set', 'milestones'):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.unlabeled_batch_size is None:
            object.__setattr__(self, 'unlabeled_batch_size', self.batch_size)
        if self.subnets < 0:
            raise ConfigError("subnets must be >= 0, got {}".format(self.subnets))
        if not 0 < self.lower_bound <= 1:
            raise ConfigError("lower_bound must lie in (0, 1], got {}".format(self.lower_bound))
        if any(not self.lower_bound <= w <= 1 for w in self.width_grid):
            raise ConfigError("width_grid entries must lie in [lower_bound, 1]")
        if not 0 < self.final_survival <= 1:
            raise ConfigError("final_survival must lie in (0, 1]")
        if any(int(s) != s or s < 1 for s in self.scale_set):
            raise ConfigError("scale_set entries must be positive integers")
        self._check_choice('subnet_mode', SUBNET_MODES)
        self._check_choice('mix', MIX_METHODS)
        self._check_choice('optimizer', OPTIMIZERS)
        self._check_choice('precision', tuple(PRECISIONS))
        if not 0 <= self.mix_prob <= 1:
            raise ConfigError("mix_prob must lie in [0, 1]")
        if self.mix_beta <= 0:
            raise ConfigError("mix_beta must be > 0")
        if self.lr < 0 or self.weight_decay < 0:
            raise ConfigError("lr and weight_decay must be >= 0")
        if self.epochs < 1 or self.batch_size < 1 or self.unlabeled_batch_size < 0:
            raise ConfigError("epochs and batch_size must be >= 1, unlabeled_batch_size >= 0")
        Schedule(self.schedule, self.milestones, self.gamma)

    def _check_choice(self, name, choices):
        if getattr(self, name) not in choices:
            raise ConfigError("{} must be one of {}, got {!r}".format(name, choices, getattr(self, name)))

    @property
    def lr_schedule(self):
        return Schedule(self.schedule, self.milestones, self.gamma)

    def replace(self, **changes):
        if ('batch_size' in changes and 'unlabeled_batch_size' not in changes
                and self.unlabeled_batch_size == self.batch_size):
            changes['unlabeled_batch_size'] = None
        return replace(self, **changes)

    @classmethod
    def keys(cls):
        return tuple(f.name for f in fields(cls))


@dataclass
class StepMetrics:
    '''What one training step did: its losses and the sub-networks it sampled.'''
    loss_f: float
    subnet_losses: list = field(default_factory=list)
    subnets: list = field(default_factory=list)
    transforms: list = field(default_factory=list)
    mix: object = None

    @property
    def loss_total(self):
        return self.loss_f + sum(self.subnet_losses)

    @property
    def mean_loss_sub(self):
        if not self.subnet_losses:
            return 0.
        return sum(self.subnet_losses) / len(self.subnet_losses)

    @property
    def widths(self):
        return [spec.width for spec in self.subnets]


METRICS_FIELDS = ('epoch', 'split', 'top1', 'top5', 'loss_f', 'mean_loss_sub', 'lr', 'wall_time')


@dataclass(frozen=True)
class MetricsRecord:
    '''One row of the metrics stream. Accuracies are percentages.'''
    epoch: int
    split: str
    top1: float
    top5: float
    loss_f: float = 0.
    mean_loss_sub: float = 0.
    lr: float = 0.
    wall_time: float = 0.

    def __post_init__(self):
        if self.top1 > self.top5:
            raise ValueError("top1 ({}) exceeds top5 ({})".format(self.top1, self.top5))

    def row(self):
        return [getattr(self, name) for name in METRICS_FIELDS]

    @classmethod
    def from_row(cls, row):
        '''Parse a CSV row given as a dict of strings.'''
        return cls(
            epoch=int(row['epoch']),
            split=row['split'],
            top1=float(row['top1']),
            top5=float(row['top5']),
            loss_f=float(row['loss_f']),
            mean_loss_sub=float(row['mean_loss_sub']),
            lr=float(row['lr']),
            wall_time=float(row['wall_time']),
        )


@dataclass
class GradReport:
    '''
    Gradients of one step split into their full-network and sub-network parts.

    ``g_std``, ``g_prime`` and ``g_total`` map parameter names to gradients of
    loss_f, of the summed sub-network losses and of their total.
    ``additivity_error`` is max |g_total - g_std - g_prime| relative to the
    largest gradient entry.
    '''
    g_std: dict
    g_prime: dict
    g_total: dict
    additivity_error: float
    widths: list = field(default_factory=list)
