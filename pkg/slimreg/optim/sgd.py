import torch
from torch.optim import Optimizer
from slimreg.core import ConfigError


def sgd_update(params, grads, state, lr, momentum=0., weight_decay=0.):
    '''
    One step of momentum SGD with coupled weight decay, in place.

    v <- momentum * v + grad + weight_decay * param
    param <- param - lr * v

    Args:
        params (list of torch.Tensor): Parameters to update.
        grads (list of torch.Tensor): Their gradients; None entries are skipped.
        state (list): Velocity buffers, one per parameter; None entries start at zero.
        lr (float): Learning rate.
        momentum (float): Momentum coefficient.
        weight_decay (float): L2 penalty coefficient.

    Returns:
        list of torch.Tensor: The updated parameters.
    '''
    if len(params) != len(grads) or len(params) != len(state):
        raise ValueError("params, grads and state must have the same length")
    with torch.no_grad():
        for i, (param, grad) in enumerate(zip(params, grads)):
            if grad is None:
                continue
            step = grad + weight_decay * param if weight_decay else grad.clone()
            if state[i] is None:
                state[i] = step
            else:
                state[i].mul_(momentum).add_(step)
            param.sub_(lr * state[i])
    return params


class MomentumSGD(Optimizer):
    '''
    torch.optim.Optimizer wrapper around sgd_update.

    Unlike torch.optim.SGD, the first step also uses v = grad + weight_decay * param,
    so the recurrence holds from the first update on.
    '''
    def __init__(self, params, lr, momentum=0.9, weight_decay=0.):
        if lr < 0:
            raise ConfigError("learning rate must be >= 0, got {}".format(lr))
        if not 0 <= momentum < 1:
            raise ConfigError("momentum must lie in [0, 1), got {}".format(momentum))
        if weight_decay < 0:
            raise ConfigError("weight decay must be >= 0, got {}".format(weight_decay))
        super().__init__(params, dict(lr=lr, momentum=momentum, weight_decay=weight_decay))

    @torch.no_grad()
    def step(self, closure=None):  # pylint: disable=arguments-differ
        loss = None
        if closure is not None:
            with torch.enable_grad():
                loss = closure()
        for group in self.param_groups:
            params = [p for p in group['params'] if p.grad is not None]
            state = [self.state[p].get('velocity') for p in params]
            sgd_update(
                params,
                [p.grad for p in params],
                state,
                group['lr'],
                group['momentum'],
                group['weight_decay'],
            )
            for param, velocity in zip(params, state):
                self.state[param]['velocity'] = velocity
        return loss


def parameter_groups(model, weight_decay, decay_norm=True):
    '''
    Split the parameters of ``model`` into weight-decay groups.

    With ``decay_norm`` every parameter is decayed. Otherwise one-dimensional
    parameters (batch norm scales and shifts, biases) get no weight decay.
    '''
    if decay_norm:
        return [{'params': list(model.parameters()), 'weight_decay': weight_decay}]
    decayed, exempt = [], []
    for param in model.parameters():
        (exempt if param.dim() <= 1 else decayed).append(param)
    return [
        {'params': decayed, 'weight_decay': weight_decay},
        {'params': exempt, 'weight_decay': 0.},
    ]


OPTIMIZERS = ('sgd', 'adam')


def build_optimizer(model, name='sgd', lr=0.1, momentum=0.9, weight_decay=5e-4, decay_norm=True):
    '''
    Create the optimizer named by ``name``.

    "sgd" is MomentumSGD; "adam" is torch.optim.Adam with L2 weight decay.
    '''
    groups = parameter_groups(model, weight_decay, decay_norm)
    if name == 'sgd':
        return MomentumSGD(groups, lr=lr, momentum=momentum, weight_decay=weight_decay)
    if name == 'adam':
        return torch.optim.Adam(groups, lr=lr, weight_decay=weight_decay)
    raise ConfigError("unknown optimizer: " + str(name))
