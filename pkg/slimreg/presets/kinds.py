'''
Experiment kinds.

Each kind is a function returning the TrainConfig of that training recipe;
keyword arguments override the kind's defaults. Defaults follow the desk-scale
CIFAR-style recipe: three sub-networks, width lower bound 0.8 and inputs
resized to one of 32, 28 or 24 pixels.
'''
from slimreg.trainer import TrainConfig

SCALE_SET = (32, 28, 24)


def _config(defaults, overrides):
    settings = dict(defaults)
    settings.update(overrides)
    return TrainConfig(**settings)


def _gradaug(**defaults):
    settings = dict(subnets=3, lower_bound=0.8, scale_set=SCALE_SET)
    settings.update(defaults)
    return settings


def baseline(**overrides):
    '''Standard training of the full network.'''
    return _config(dict(subnets=0), overrides)


def rand_scale(**overrides):
    '''Extra passes of the full network on randomly resized inputs.'''
    return _config(_gradaug(subnet_mode='full'), overrides)


def rand_width(**overrides):
    '''Random-width sub-networks on the untransformed batch.'''
    return _config(_gradaug(scale_set=()), overrides)


def gradaug(**overrides):
    '''
    Random-width sub-networks on randomly resized inputs, trained against the
    full network's predictions.

    Args:
        subnets (int): Sub-networks per step.
        lower_bound (float): Smallest sub-network width.
        scale_set (tuple): Input sizes drawn for each sub-network.
        **overrides: Any other TrainConfig field.
    '''
    return _config(_gradaug(), overrides)


def gradaug_cutmix(**overrides):
    '''GradAug with CutMix applied to half of the full-network batches.'''
    return _config(_gradaug(mix='cutmix', mix_prob=0.5), overrides)


def gradaug_mixup(**overrides):
    '''GradAug with Mixup on the full network's batch.'''
    return _config(_gradaug(mix='mixup'), overrides)


def gradaug_rotation(**overrides):
    '''Sub-networks see randomly rotated instead of resized inputs.'''
    return _config(_gradaug(scale_set=(), rotation=True), overrides)


def gradaug_scale_rotation(**overrides):
    return _config(_gradaug(rotation=True), overrides)


def gradaug_depth(**overrides):
    '''Sub-networks drop residual blocks instead of channels.'''
    return _config(_gradaug(subnet_mode='depth', final_survival=0.5), overrides)


def gradaug_no_sl(**overrides):
    '''GradAug with sub-networks trained on the ground-truth labels.'''
    return _config(_gradaug(soft_label=False), overrides)


def gradaug_no_ss(**overrides):
    '''GradAug without the sub-network forced to the lower bound.'''
    return _config(_gradaug(always_smallest=False), overrides)


def gradaug_no_ss_sl(**overrides):
    return _config(_gradaug(always_smallest=False, soft_label=False), overrides)


def stochdepth(**overrides):
    '''Stochastic depth: the full network drops residual blocks, linear-decay survival.'''
    return _config(dict(subnets=0, drop_path=True, final_survival=0.5), overrides)


def mixup(**overrides):
    return _config(dict(subnets=0, mix='mixup'), overrides)


def cutmix(**overrides):
    return _config(dict(subnets=0, mix='cutmix', mix_prob=0.5), overrides)


def _low_data(epochs, **defaults):
    settings = dict(
        optimizer='adam',
        lr=0.001,
        weight_decay=0.,
        schedule='step',
        milestones=tuple(sorted({max(1, int(0.4 * epochs)), max(1, int(0.8 * epochs))})),
        gamma=0.2,
        batch_size=50,
        epochs=epochs,
    )
    settings.update(defaults)
    return settings


def lowdata_baseline(epochs=10, **overrides):
    '''Supervised training on a small label budget with the Adam recipe.'''
    return _config(_low_data(epochs, subnets=0), overrides)


def lowdata_gradaug(epochs=10, **overrides):
    '''GradAug with four sub-networks on a small label budget with the Adam recipe.'''
    return _config(_low_data(epochs, **_gradaug(subnets=4)), overrides)


def gradaug_semi(epochs=10, **overrides):
    '''
    lowdata_gradaug plus pseudo-labels: sub-networks also learn from the full
    network's predictions on as many unlabeled images per step as labeled ones (50).
    '''
    return _config(_low_data(epochs, **_gradaug(subnets=4)), overrides)
