import copy
import torch
from .config import GradReport
from .steps import gradaug_backward


def _collect(model):
    return {
        name: param.grad.detach().clone() if param.grad is not None else torch.zeros_like(param)
        for name, param in model.named_parameters()
    }


def gradient_decompose(model, x, y, cfg, rng):
    '''
    Split the gradient of one training step into its two parts.

    The step is replayed three times from copies of ``rng``: full-network loss
    only (g_std), sub-network losses only (g_prime) and both (g_total). The
    model's parameters, gradients and batch norm buffers are left as they were,
    and ``rng`` is not advanced.

    Returns:
        GradReport: The three gradients and the relative additivity error.
    '''
    saved_grads = {name: param.grad for name, param in model.named_parameters()}
    saved_buffers = {name: buffer.clone() for name, buffer in model.named_buffers()}

    def replay(full_grad, subnet_grad):
        for param in model.parameters():
            param.grad = None
        metrics = gradaug_backward(model, x, y, cfg, copy.deepcopy(rng), full_grad=full_grad, subnet_grad=subnet_grad)
        grads = _collect(model)
        with torch.no_grad():
            for name, buffer in model.named_buffers():
                buffer.copy_(saved_buffers[name])
        return grads, metrics

    try:
        g_std, _ = replay(True, False)
        g_prime, _ = replay(False, True)
        g_total, metrics = replay(True, True)
    finally:
        for name, param in model.named_parameters():
            param.grad = saved_grads[name]

    deviation, scale = 0., 0.
    for name, total in g_total.items():
        deviation = max(deviation, (total - g_std[name] - g_prime[name]).abs().max().item())
        scale = max(scale, total.abs().max().item(), g_std[name].abs().max().item(),
                    g_prime[name].abs().max().item())
    return GradReport(
        g_std=g_std,
        g_prime=g_prime,
        g_total=g_total,
        additivity_error=deviation / scale if scale > 0 else deviation,
        widths=metrics.widths,
    )
