from dataclasses import dataclass
import torch
from slimreg.core import BNMode, ConfigError, softmax_cross_entropy
from .accuracy import evaluate

DEFAULT_EPSILONS = (0., 0.05, 0.10, 0.15)


@dataclass(frozen=True)
class AttackConfig:
    '''
    A white-box FGSM attack.

    ``epsilon`` is measured in the model's input units. ``valid_range`` is a
    (lo, hi) pair of scalars or of per-channel sequences.
    '''
    epsilon: float = 0.
    valid_range: tuple = (0., 1.)

    def __post_init__(self):
        if self.epsilon < 0:
            raise ConfigError("epsilon must be >= 0, got {}".format(self.epsilon))


def _bound(value, x):
    bound = torch.as_tensor(value, dtype=x.dtype, device=x.device)
    if bound.dim() == 1:
        bound = bound.view(1, -1, 1, 1)
    return bound


def fgsm_attack(model, x, y, epsilon, valid_range=(0., 1.)):
    '''
    Fast gradient sign attack.

    x_adv = clip(x + epsilon * sign(grad_x loss(model(x), y)), lo, hi), with the
    model in eval mode. The model's parameter gradients are left untouched.

    Args:
        model (SlimmableNetwork): The attacked model.
        x (torch.Tensor): [N, C, H, W] inputs inside ``valid_range``.
        y (torch.Tensor): [N] labels.
        epsilon (float): Perturbation size, >= 0.
        valid_range (tuple): (lo, hi), scalars or per-channel sequences.

    Returns:
        torch.Tensor: The adversarial inputs.
    '''
    attack = AttackConfig(epsilon, valid_range)
    if attack.epsilon == 0:
        return x.detach().clone()
    inputs = x.detach().clone().requires_grad_(True)
    loss = softmax_cross_entropy(model(inputs, bn_mode=BNMode.EVAL), y)
    grad, = torch.autograd.grad(loss, inputs)
    adversarial = x.detach() + attack.epsilon * grad.sign()
    lo, hi = (_bound(value, x) for value in attack.valid_range)
    return torch.max(torch.min(adversarial, hi), lo)


def fgsm_eval(model, dataset, epsilons=DEFAULT_EPSILONS, valid_range=None, batch_size=256):
    '''
    Top-1 accuracy under FGSM for every epsilon.

    Args:
        valid_range (tuple, optional): Defaults to the dataset's normalized
            image of [0, 1].

    Returns:
        dict: epsilon -> top-1 accuracy in percent.
    '''
    valid_range = dataset.valid_range if valid_range is None else valid_range
    results = {}
    for epsilon in epsilons:
        adversarial = torch.cat([
            fgsm_attack(model, dataset.images[i:i + batch_size], dataset.labels[i:i + batch_size],
                        epsilon, valid_range)
            for i in range(0, len(dataset.labels), batch_size)
        ]) if len(dataset.labels) else dataset.images
        results[float(epsilon)] = evaluate(model, dataset, batch_size=batch_size, images=adversarial)[0]
    return results
