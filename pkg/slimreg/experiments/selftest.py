'''
Mechanism checks runnable without an experiment: gradient correctness,
full-width equivalence, prefix nesting, the zero sub-network reduction and
gradient additivity. Each check runs on a tiny double-precision model.
'''
import copy
from dataclasses import dataclass
import numpy as np
import torch
from slimreg.core import BNMode, grad_check, softmax_cross_entropy
from slimreg.nn import Width, build_model
from slimreg.optim import build_optimizer
from slimreg.trainer import TrainConfig, gradaug_step, gradient_decompose, standard_step

NESTED_WIDTHS = (0.7, 0.8, 0.9, 1.)


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float

    def __str__(self):
        return '{:<24} {} ({:.3g}, threshold {:.3g})'.format(
            self.name, 'ok' if self.passed else 'FAILED', self.value, self.threshold)


def _model(seed):
    torch.manual_seed(seed)
    return build_model('small_cnn', dtype=torch.float64, num_classes=3, widths=(4, 8, 8))


def _batch(seed, n=6, size=8):
    generator = torch.Generator().manual_seed(seed)
    x = torch.randn(n, 3, size, size, generator=generator, dtype=torch.float64)
    y = torch.arange(n) % 3
    return x, y


def check_gradients(seed=0, tolerance=1e-4):
    '''Backward gradients against central finite differences.'''
    model = _model(seed)
    x, y = _batch(seed)
    report = grad_check(
        lambda: softmax_cross_entropy(model(x, bn_mode=BNMode.TRAIN_FROZEN_STATS), y),
        model.named_parameters(),
    )
    return CheckResult('gradients', report.passed(tolerance), report.max_error, tolerance)


def check_full_width(seed=0, batches=100):
    '''Width(1.0) logits are bit-identical to the plain forward pass.'''
    model = _model(seed)
    model.eval()
    mismatches = 0
    with torch.no_grad():
        for i in range(batches):
            x, _ = _batch(seed + i)
            if not torch.equal(model(x, subnet=Width(1.)), model(x)):
                mismatches += 1
    return CheckResult('full_width', mismatches == 0, mismatches, 0)


def check_prefix_nesting(seed=0):
    '''Every smaller width slice is the leading block of every larger one.'''
    model = _model(seed)
    mismatches = 0
    for layer in model.modules():
        if layer is model or not hasattr(layer, 'slice_params'):
            continue
        slices = [layer.slice_params(width) for width in NESTED_WIDTHS]
        for i, small in enumerate(slices):
            for large in slices[i + 1:]:
                for name, value in small.items():
                    block = large[name][tuple(slice(0, size) for size in value.shape)]
                    if not torch.equal(block, value):
                        mismatches += 1
    return CheckResult('prefix_nesting', mismatches == 0, mismatches, 0)


def check_zero_subnets(seed=0, steps=5):
    '''GradAug with no sub-networks takes exactly the standard step.'''
    model = _model(seed)
    other = copy.deepcopy(model)
    cfg = TrainConfig(subnets=0, weight_decay=0.)
    first = build_optimizer(model, lr=0.1, weight_decay=0.)
    second = build_optimizer(other, lr=0.1, weight_decay=0.)
    for step in range(steps):
        x, y = _batch(seed + step)
        gradaug_step(model, first, x, y, cfg, np.random.default_rng(step))
        standard_step(other, second, x, y, cfg)
    deviation = max(
        (a - b).abs().max().item() for a, b in zip(model.parameters(), other.parameters())
    )
    return CheckResult('zero_subnets', deviation == 0., deviation, 0.)


def check_additivity(seed=0, steps=20, tolerance=1e-6):
    '''The step gradient is the sum of its full-network and sub-network parts.'''
    model = _model(seed)
    cfg = TrainConfig(subnets=3, lower_bound=0.5, scale_set=(8, 6))
    optimizer = build_optimizer(model, lr=0.05)
    rng = np.random.default_rng(seed)
    worst = 0.
    for step in range(steps):
        x, y = _batch(seed + step)
        worst = max(worst, gradient_decompose(model, x, y, cfg, rng).additivity_error)
        gradaug_step(model, optimizer, x, y, cfg, rng)
    return CheckResult('additivity', worst < tolerance, worst, tolerance)


CHECKS = (check_gradients, check_full_width, check_prefix_nesting, check_zero_subnets, check_additivity)


def run_selftest(seed=0):
    '''
    Run every mechanism check.

    Returns:
        list(CheckResult): One result per check, in order.
    '''
    return [check(seed) for check in CHECKS]
