'''Sub-network specs and the sampling policy used to draw them each step.'''
from dataclasses import dataclass
from slimreg.core import ConfigError, SubnetError, WidthError


class SubnetSpec:
    '''Selects the part of a slimmable network that a forward pass executes.'''
    width = 1.
    transform_id = 0

    def check(self, model):
        pass

    def block(self, index):
        '''Returns (keep, residual_scale) for the residual block at ``index``.'''
        return True, None


@dataclass(frozen=True)
class Width(SubnetSpec):
    '''
    The sub-network keeping the leading channels_at(c, width) channels of every scalable layer.

    ``lower_bound`` is the smallest width the sampling policy admits; widths
    below it are rejected.
    '''
    width: float = 1.
    transform_id: int = 0
    lower_bound: float = 0.

    def __post_init__(self):
        if not 0 < self.width <= 1 or self.width < self.lower_bound:
            raise WidthError("width {} outside [{}, 1]".format(self.width, self.lower_bound))


@dataclass(frozen=True)
class Depth(SubnetSpec):
    '''
    The sub-network keeping the residual blocks whose mask entry is True.

    If ``survival`` is given, the residual branch of each kept block is scaled by
    1 / survival[b], so that the expected output matches the full network.
    '''
    mask: tuple = ()
    survival: tuple = None
    transform_id: int = 0

    def check(self, model):
        if len(self.mask) != model.num_blocks:
            raise SubnetError("depth mask has {} entries but the model has {} residual blocks".format(
                len(self.mask), model.num_blocks))
        if self.survival is not None and len(self.survival) != len(self.mask):
            raise SubnetError("survival probabilities do not match the depth mask")

    def block(self, index):
        keep = bool(self.mask[index])
        if self.survival is None or not keep:
            return keep, None
        return keep, 1. / self.survival[index]


def forward_subnet(model, spec, x, bn_mode):
    '''
    Run the sub-network selected by ``spec``.

    Args:
        model (SlimmableNetwork): The shared-weight network.
        spec (SubnetSpec): Width or Depth spec.
        x (torch.Tensor): Input batch.
        bn_mode (BNMode): How batch norm layers treat their statistics.

    Returns:
        torch.Tensor: Logits.
    '''
    return model(x, subnet=spec, bn_mode=bn_mode)


def slice_params(layer, width):
    return layer.slice_params(width)


def sample_subnet_widths(rng, n, lower_bound, always_smallest=True, grid=None):
    '''
    Draw the widths of the n sub-networks trained in one step.

    If n > 1 and ``always_smallest`` is set, the first width is exactly
    ``lower_bound``. The others are drawn i.i.d. from Uniform(lower_bound, 1),
    or uniformly from ``grid`` when one is given.

    Args:
        rng (numpy.random.Generator): The random stream.
        n (int): Number of sub-networks.
        lower_bound (float): Smallest admissible width.
        always_smallest (bool): Force one sub-network at the lower bound.
        grid (sequence of float, optional): Discrete set of widths to draw from.

    Returns:
        list(float): The widths, in sampling order.
    '''
    if n < 0:
        raise ConfigError("number of sub-networks must be >= 0, got {}".format(n))
    if not 0 < lower_bound <= 1:
        raise ConfigError("width lower bound must lie in (0, 1], got {}".format(lower_bound))
    widths = []
    if n > 1 and always_smallest:
        widths.append(float(lower_bound))
    while len(widths) < n:
        if grid:
            widths.append(float(grid[rng.integers(len(grid))]))
        else:
            widths.append(float(rng.uniform(lower_bound, 1.)))
    return widths


def survival_probabilities(num_blocks, final_survival):
    '''Linear decay: block b of B survives with probability 1 - (b / B)(1 - final_survival).'''
    if not 0 < final_survival <= 1:
        raise ConfigError("final survival probability must lie in (0, 1], got {}".format(final_survival))
    return tuple(1. - (b / num_blocks) * (1. - final_survival) for b in range(1, num_blocks + 1))


def sample_depth_mask(rng, num_blocks, final_survival):
    '''Draw which residual blocks survive, following the linear-decay schedule.'''
    probabilities = survival_probabilities(num_blocks, final_survival)
    draws = rng.random(num_blocks)
    return tuple(bool(u < p) for u, p in zip(draws, probabilities))
