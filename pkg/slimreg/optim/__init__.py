from .sgd import OPTIMIZERS, MomentumSGD, build_optimizer, parameter_groups, sgd_update
from .scheduler import SCHEDULES, EpochScheduler, Schedule, lr_at

__all__ = [
    'OPTIMIZERS',
    'MomentumSGD',
    'build_optimizer',
    'parameter_groups',
    'sgd_update',
    'SCHEDULES',
    'EpochScheduler',
    'Schedule',
    'lr_at',
]
