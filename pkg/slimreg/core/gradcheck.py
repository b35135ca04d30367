import torch
from .tensor import backward


class GradCheckReport(dict):
    '''Maps each parameter name to the relative error of its backward gradient.'''

    @property
    def max_error(self):
        return max(self.values(), default=0.0)

    def passed(self, tolerance):
        return self.max_error < tolerance


def grad_check(loss_fn, parameters, step=1e-5):
    '''
    Compare backward gradients with central finite differences.

    For each parameter the error is max|g - g_fd| / max(max|g|, max|g_fd|),
    where g is the backward gradient and g_fd the central difference
    (L(p + h) - L(p - h)) / 2h computed element by element. Use double precision.

    Args:
        loss_fn (callable): Computes the scalar loss from the current parameter values.
        parameters (dict or iterable): Named leaf tensors to check, e.g.
            ``model.named_parameters()``.
        step (float): The finite difference step h.

    Returns:
        GradCheckReport: Per-parameter relative errors. Empty if no parameters are given.
    '''
    parameters = dict(parameters)
    report = GradCheckReport()
    if not parameters:
        return report

    for param in parameters.values():
        param.grad = None
    backward(loss_fn())
    analytic = {
        name: param.grad.detach().clone() if param.grad is not None else torch.zeros_like(param)
        for name, param in parameters.items()
    }

    with torch.no_grad():
        for name, param in parameters.items():
            flat = param.view(-1)
            numeric = torch.zeros_like(flat)
            for i in range(flat.numel()):
                original = flat[i].item()
                flat[i] = original + step
                plus = loss_fn().item()
                flat[i] = original - step
                minus = loss_fn().item()
                flat[i] = original
                numeric[i] = (plus - minus) / (2 * step)
            expected = analytic[name].view(-1)
            scale = max(expected.abs().max().item(), numeric.abs().max().item(), 1e-12)
            report[name] = (expected - numeric).abs().max().item() / scale
    return report
