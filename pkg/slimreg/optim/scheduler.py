import math
from dataclasses import dataclass, field
from torch.optim.lr_scheduler import LambdaLR
from slimreg.core import ConfigError
from slimreg.logging import DummyWriter

SCHEDULES = ('cosine', 'step', 'constant')


@dataclass(frozen=True)
class Schedule:
    '''
    A per-epoch learning-rate schedule.

    "cosine" anneals from lr0 to 0 over the run; "step" multiplies by ``gamma``
    at every milestone passed; "constant" keeps lr0.
    '''
    kind: str = 'cosine'
    milestones: tuple = field(default_factory=tuple)
    gamma: float = 0.1

    def __post_init__(self):
        if self.kind not in SCHEDULES:
            raise ConfigError("unknown schedule: " + str(self.kind))
        if list(self.milestones) != sorted(self.milestones):
            raise ConfigError("milestones must be increasing")
        if self.gamma <= 0:
            raise ConfigError("gamma must be > 0")


def lr_at(schedule, epoch, total_epochs, lr0):
    '''
    The learning rate used during ``epoch`` (0-based) of a ``total_epochs`` run.

    Examples:
        >>> lr_at(Schedule('step', (150, 225), 0.1), 200, 300, 0.1)
        0.010000000000000002
    '''
    if schedule.kind == 'cosine':
        return lr0 * 0.5 * (1. + math.cos(math.pi * epoch / total_epochs))
    if schedule.kind == 'step':
        passed = sum(1 for milestone in schedule.milestones if epoch >= milestone)
        return lr0 * schedule.gamma ** passed
    return lr0


class EpochScheduler(LambdaLR):
    '''
    Applies a Schedule to every parameter group of an optimizer.

    Call ``step()`` once per epoch; the new learning rate is logged to the
    writer as ``schedule/lr``.
    '''
    def __init__(self, optimizer, schedule, total_epochs, writer=DummyWriter()):
        if total_epochs < 1:
            raise ConfigError("total_epochs must be >= 1")
        self.schedule = schedule
        self.total_epochs = total_epochs
        self.writer = writer
        super().__init__(optimizer, lambda epoch: lr_at(schedule, epoch, total_epochs, 1.))

    @property
    def lr(self):
        return self.optimizer.param_groups[0]['lr']

    def step(self, epoch=None):  # pylint: disable=arguments-differ
        super().step(epoch)
        self.writer.add_schedule('lr', self.lr, step="epoch")
