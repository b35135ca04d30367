'''
Single training steps.

Every random decision of a step (batch augmentation, sub-network choice, input
transforms) is drawn from the ``rng`` passed in, in a fixed order: the batch
augmentation, the stochastic-depth mask of the full network, the sub-networks,
then one transform per sub-network.
'''
import torch
from torch.nn import functional as F
from slimreg.core import BNMode, ConfigError, backward, one_hot, soft_target_loss, softmax_cross_entropy
from slimreg.logging import DummyWriter
from slimreg.nn import Depth, Width, forward_subnet, sample_depth_mask, sample_subnet_widths, survival_probabilities
from slimreg.transforms import MixSpec, compose, sample_mix, sample_transform
from .config import StepMetrics


def sample_subnets(model, cfg, rng):
    '''Draw the cfg.subnets sub-networks of one step.'''
    if cfg.subnet_mode == 'width':
        widths = sample_subnet_widths(rng, cfg.subnets, cfg.lower_bound, cfg.always_smallest, cfg.width_grid)
        return [Width(width, i + 1, lower_bound=cfg.lower_bound) for i, width in enumerate(widths)]
    if cfg.subnet_mode == 'depth':
        return [
            Depth(sample_depth_mask(rng, model.num_blocks, cfg.final_survival), transform_id=i + 1)
            for i in range(cfg.subnets)
        ]
    return [Width(1., i + 1) for i in range(cfg.subnets)]


def _draw_full(model, x, cfg, rng):
    if rng is None and (cfg.mix != 'none' or cfg.drop_path):
        raise ConfigError("a random generator is required for mix or drop_path training")
    n, _, height, width = x.shape
    mix = sample_mix(rng, cfg.mix, n, height, width, beta=cfg.mix_beta, prob=cfg.mix_prob)
    spec = Width(1.)
    if cfg.drop_path:
        spec = Depth(
            sample_depth_mask(rng, model.num_blocks, cfg.final_survival),
            survival_probabilities(model.num_blocks, cfg.final_survival),
        )
    return mix, spec


def _mixed_targets(logits, y, mix):
    return mix.apply_labels(one_hot(y, logits.shape[1], dtype=logits.dtype))


def _hard_loss(logits, y, mix):
    if mix.method == 'none':
        return softmax_cross_entropy(logits, y)
    return soft_target_loss(logits, _mixed_targets(logits, y, mix))


def _subnet_passes(model, x, mix, cfg, rng, loss_fn, writer):
    subnets = sample_subnets(model, cfg, rng)
    transforms, losses = [], []
    for spec in subnets:
        transform = sample_transform(rng, cfg.scale_set, cfg.rotation, writer)
        logits = forward_subnet(model, spec, compose(mix, transform, x), BNMode.TRAIN_FROZEN_STATS)
        loss = loss_fn(logits)
        backward(loss)
        writer.add_loss('subnet', loss.item())
        transforms.append(transform)
        losses.append(loss.item())
    return subnets, transforms, losses


def gradaug_backward(model, x, y, cfg, rng, writer=DummyWriter(), full_grad=True, subnet_grad=True):
    '''
    Accumulate the gradient of L = loss_f + sum_i loss_i into the parameters.

    The full network sees f(x), where f is the batch augmentation, with batch
    norm tracking its running statistics. Each sub-network sees T_i(f(x)) with
    frozen statistics and is trained against the detached full-network
    probabilities (``soft_label``) or the same labels as the full network.
    Losses are backwarded one after another, so the graph of only one pass is
    alive at a time.

    Args:
        model (SlimmableNetwork): The model to train.
        x (torch.Tensor): [N, C, H, W] input batch.
        y (torch.Tensor): [N] integer labels.
        cfg (TrainConfig): Training configuration.
        rng (numpy.random.Generator): Source of all step randomness.
        writer (Writer): Receives losses and transform choices.
        full_grad (bool): Backward loss_f.
        subnet_grad (bool): Run and backward the sub-network passes.

    Returns:
        StepMetrics: The losses and sampled sub-networks.
    '''
    mix, full = _draw_full(model, x, cfg, rng)
    output_f = forward_subnet(model, full, mix.apply_images(x), BNMode.TRAIN_TRACKING)
    loss_f = _hard_loss(output_f, y, mix)
    if full_grad:
        backward(loss_f)
    writer.add_loss('full', loss_f.item())
    metrics = StepMetrics(loss_f.item(), mix=mix)
    if not subnet_grad:
        return metrics
    if cfg.soft_label:
        soft_labels = F.softmax(output_f.detach(), dim=1)

        def loss_fn(logits):
            return soft_target_loss(logits, soft_labels)
    else:
        def loss_fn(logits):
            return _hard_loss(logits, y, mix)

    metrics.subnets, metrics.transforms, metrics.subnet_losses = _subnet_passes(
        model, x, mix, cfg, rng, loss_fn, writer
    )
    return metrics


def gradaug_step(model, optimizer, x, y, cfg, rng, writer=DummyWriter()):
    '''
    One optimizer step on the full network plus cfg.subnets sub-networks.

    Returns:
        (float, StepMetrics): The total loss and the step's metrics.
    '''
    optimizer.zero_grad()
    metrics = gradaug_backward(model, x, y, cfg, rng, writer)
    optimizer.step()
    return metrics.loss_total, metrics


def standard_step(model, optimizer, x, y, cfg, rng=None, writer=DummyWriter()):
    '''
    One optimizer step on the full network only.

    ``rng`` is needed only when cfg asks for a batch augmentation or drop_path.

    Returns:
        float: The loss.
    '''
    optimizer.zero_grad()
    mix, full = _draw_full(model, x, cfg, rng)
    logits = forward_subnet(model, full, mix.apply_images(x), BNMode.TRAIN_TRACKING)
    loss = _hard_loss(logits, y, mix)
    backward(loss)
    optimizer.step()
    writer.add_loss('full', loss.item())
    return loss.item()


def pseudo_label_step(model, optimizer, x, y, unlabeled, cfg, rng, writer=DummyWriter()):
    '''
    One semi-supervised step.

    The full network trains on the labeled batch. Its predictions on the
    unlabeled batch, computed with batch statistics and without touching the
    running buffers, become pseudo-labels. Every sub-network then trains on the
    transformed labeled and unlabeled images together, against the full
    network's probabilities on the labeled part and the pseudo-labels on the
    unlabeled part.

    Args:
        unlabeled (torch.Tensor): [M, C, H, W] images without labels; an empty
            batch reduces the step to gradaug_step.

    Returns:
        (float, StepMetrics): The total loss and the step's metrics.
    '''
    if cfg.subnets < 1:
        raise ConfigError("pseudo-label training needs at least one sub-network")
    if unlabeled is None or len(unlabeled) == 0:
        return gradaug_step(model, optimizer, x, y, cfg, rng, writer)
    optimizer.zero_grad()
    mix, full = _draw_full(model, x, cfg, rng)
    inputs = mix.apply_images(x)
    output_f = forward_subnet(model, full, inputs, BNMode.TRAIN_TRACKING)
    loss_f = _hard_loss(output_f, y, mix)
    backward(loss_f)
    writer.add_loss('full', loss_f.item())
    with torch.no_grad():
        pseudo_labels = F.softmax(forward_subnet(model, Width(1.), unlabeled, BNMode.TRAIN_FROZEN_STATS), dim=1)
    targets = torch.cat([F.softmax(output_f.detach(), dim=1), pseudo_labels])
    metrics = StepMetrics(loss_f.item(), mix=mix)
    metrics.subnets, metrics.transforms, metrics.subnet_losses = _subnet_passes(
        model, torch.cat([inputs, unlabeled]), MixSpec(), cfg, rng,
        lambda logits: soft_target_loss(logits, targets), writer,
    )
    optimizer.step()
    return metrics.loss_total, metrics
