'''
Primitive tensor operations used to build slimmable networks.

Tensors are plain ``torch.Tensor`` objects and the autograd graph recorded by
torch plays the role of the tape. The functions below validate shapes and
arguments and raise the structured errors in ``slimreg.core.errors`` before
handing off to ``torch.nn.functional``.
'''
from dataclasses import dataclass
from enum import Enum
import torch
from torch.nn import functional as F
from .errors import BackwardError, DimensionError, DistributionError, LabelError

PRECISIONS = {
    'single': torch.float32,
    'double': torch.float64,
}


class BNMode(Enum):
    '''How a batch normalization layer treats its statistics.'''
    TRAIN_TRACKING = 'train_tracking'
    TRAIN_FROZEN_STATS = 'train_frozen_stats'
    EVAL = 'eval'


@dataclass
class BatchNormState:
    running_mean: torch.Tensor
    running_var: torch.Tensor
    momentum: float = 0.1
    eps: float = 1e-5


def set_precision(precision):
    '''
    Select the default floating point type for newly created tensors.

    Args:
        precision (str): Either "single" (float32) or "double" (float64).

    Returns:
        torch.dtype: The selected dtype.
    '''
    if precision not in PRECISIONS:
        raise ValueError("Unknown precision: " + str(precision))
    dtype = PRECISIONS[precision]
    torch.set_default_dtype(dtype)
    return dtype


def tensor(data, requires_grad=False, dtype=None):
    return torch.tensor(data, dtype=dtype or torch.get_default_dtype(), requires_grad=requires_grad)


def conv2d(x, weight, bias=None, stride=1, padding=0, exact=False):
    '''
    2D convolution of an [N, Cin, H, W] batch with a [Cout, Cin, k, k] kernel.

    The output size is (H + 2 * padding - k) // stride + 1. If ``exact`` is set,
    a stride that does not tile the padded input exactly is rejected.
    '''
    if x.dim() != 4 or weight.dim() != 4:
        raise DimensionError(
            "conv2d expects 4D input and weight, got {} and {}".format(tuple(x.shape), tuple(weight.shape))
        )
    c_out, c_in, k_h, k_w = weight.shape
    if x.shape[1] != c_in:
        raise DimensionError("conv2d input has {} channels, weight expects {}".format(x.shape[1], c_in))
    if k_h != k_w or k_h < 1:
        raise DimensionError("conv2d expects a square kernel with k >= 1, got {}x{}".format(k_h, k_w))
    if bias is not None and tuple(bias.shape) != (c_out,):
        raise DimensionError("conv2d bias shape {} does not match {} outputs".format(tuple(bias.shape), c_out))
    if padding < 0 or stride < 1:
        raise DimensionError("conv2d needs padding >= 0 and stride >= 1")
    for size in x.shape[2:]:
        span = size + 2 * padding - k_h
        if span < 0:
            raise DimensionError("conv2d kernel {} larger than padded input {}".format(k_h, size + 2 * padding))
        if exact and span % stride != 0:
            raise DimensionError("conv2d stride {} does not tile input of size {}".format(stride, size))
    return F.conv2d(x, weight, bias, stride=stride, padding=padding)


def batchnorm(x, gamma, beta, state, mode):
    '''
    Batch normalization over the channel axis of an [N, C, H, W] batch.

    Args:
        x (torch.Tensor): The input batch.
        gamma (torch.Tensor): Per-channel scale of length C.
        beta (torch.Tensor): Per-channel shift of length C.
        state (BatchNormState): Running statistics, momentum and eps.
        mode (BNMode): TRAIN_TRACKING normalizes with batch statistics and
            updates the running statistics by exponential moving average
            (running = (1 - momentum) * running + momentum * batch; the variance
            uses the unbiased batch estimate). TRAIN_FROZEN_STATS normalizes with
            batch statistics and leaves the running buffers untouched. EVAL
            normalizes with the running statistics.

    Returns:
        torch.Tensor: The normalized batch.
    '''
    channels = x.shape[1]
    for name, t in (('gamma', gamma), ('beta', beta),
                    ('running_mean', state.running_mean), ('running_var', state.running_var)):
        if tuple(t.shape) != (channels,):
            raise DimensionError("batchnorm {} has shape {}, expected ({},)".format(name, tuple(t.shape), channels))
    mode = BNMode(mode)
    if mode == BNMode.TRAIN_TRACKING:
        return F.batch_norm(
            x, state.running_mean, state.running_var, gamma, beta,
            training=True, momentum=state.momentum, eps=state.eps
        )
    if mode == BNMode.TRAIN_FROZEN_STATS:
        return F.batch_norm(x, None, None, gamma, beta, training=True, eps=state.eps)
    return F.batch_norm(
        x, state.running_mean, state.running_var, gamma, beta,
        training=False, eps=state.eps
    )


def linear(x, weight, bias=None):
    if x.dim() != 2 or weight.dim() != 2 or x.shape[1] != weight.shape[1]:
        raise DimensionError(
            "linear cannot map input {} with weight {}".format(tuple(x.shape), tuple(weight.shape))
        )
    if bias is not None and tuple(bias.shape) != (weight.shape[0],):
        raise DimensionError("linear bias shape {} does not match weight {}".format(
            tuple(bias.shape), tuple(weight.shape)))
    return F.linear(x, weight, bias)


def relu(x):
    # the subgradient at exactly 0 is 0
    return F.relu(x)


def global_avg_pool(x):
    if x.dim() != 4:
        raise DimensionError("global_avg_pool expects [N, C, H, W], got {}".format(tuple(x.shape)))
    return x.mean(dim=(2, 3))


def _check_labels(labels, num_classes):
    if labels.numel() > 0 and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelError("labels must lie in [0, {})".format(num_classes))


def softmax_cross_entropy(logits, labels):
    '''Mean over the batch of -log softmax(logits)[label].'''
    if logits.dim() != 2 or labels.shape != logits.shape[:1]:
        raise DimensionError("softmax_cross_entropy expects [N, K] logits and [N] labels")
    _check_labels(labels, logits.shape[1])
    return F.cross_entropy(logits, labels)


def soft_target_loss(student_logits, target_probs, tolerance=1e-6):
    '''
    Cross-entropy of the student against a target distribution.

    The target is detached, so no gradient ever flows into it.

    Args:
        student_logits (torch.Tensor): [N, K] logits.
        target_probs (torch.Tensor): [N, K] rows summing to one.
        tolerance (float): Allowed deviation of each row sum from one.

    Returns:
        torch.Tensor: The scalar mean loss.
    '''
    if student_logits.shape != target_probs.shape or student_logits.dim() != 2:
        raise DimensionError("soft_target_loss shapes {} and {} do not match".format(
            tuple(student_logits.shape), tuple(target_probs.shape)))
    targets = target_probs.detach()
    if targets.numel() > 0:
        deviation = (targets.sum(dim=1) - 1).abs().max()
        if deviation > tolerance:
            raise DistributionError("target rows deviate from 1 by {:.3g}".format(deviation.item()))
    log_probs = F.log_softmax(student_logits, dim=1)
    return -(targets * log_probs).sum(dim=1).mean()


def one_hot(labels, num_classes, dtype=None):
    _check_labels(labels, num_classes)
    return F.one_hot(labels, num_classes).to(dtype or torch.get_default_dtype())


def backward(loss, retain_graph=False):
    '''
    Accumulate d(loss)/d(leaf) into the ``grad`` of every reachable leaf.

    Gradients add onto whatever is already stored, so several losses may be
    backwarded before a single optimizer step.
    '''
    if loss.dim() != 0:
        raise BackwardError("backward needs a scalar loss, got shape {}".format(tuple(loss.shape)))
    loss.backward(retain_graph=retain_graph)
