from slimreg.core import ConfigError
from .kinds import (
    SCALE_SET,
    baseline,
    cutmix,
    gradaug,
    gradaug_cutmix,
    gradaug_depth,
    gradaug_mixup,
    gradaug_no_sl,
    gradaug_no_ss,
    gradaug_no_ss_sl,
    gradaug_rotation,
    gradaug_scale_rotation,
    gradaug_semi,
    lowdata_baseline,
    lowdata_gradaug,
    mixup,
    rand_scale,
    rand_width,
    stochdepth,
)

KINDS = {
    'baseline': baseline,
    'rand_scale': rand_scale,
    'rand_width': rand_width,
    'gradaug': gradaug,
    'gradaug_cutmix': gradaug_cutmix,
    'gradaug_mixup': gradaug_mixup,
    'gradaug_rotation': gradaug_rotation,
    'gradaug_scale_rotation': gradaug_scale_rotation,
    'gradaug_depth': gradaug_depth,
    'gradaug_no_sl': gradaug_no_sl,
    'gradaug_no_ss': gradaug_no_ss,
    'gradaug_no_ss_sl': gradaug_no_ss_sl,
    'stochdepth': stochdepth,
    'mixup': mixup,
    'cutmix': cutmix,
    'lowdata_baseline': lowdata_baseline,
    'lowdata_gradaug': lowdata_gradaug,
    'gradaug_semi': gradaug_semi,
}

# kinds that draw unlabeled images every step
SEMI_SUPERVISED = ('gradaug_semi',)


def train_config(kind, **overrides):
    '''The TrainConfig of experiment kind ``kind`` with ``overrides`` applied.'''
    if kind not in KINDS:
        raise ConfigError("unknown experiment kind {!r}, expected one of {}".format(kind, sorted(KINDS)))
    try:
        return KINDS[kind](**overrides)
    except TypeError as error:
        raise ConfigError("invalid settings for kind {!r}: {}".format(kind, error)) from error


__all__ = ['KINDS', 'SEMI_SUPERVISED', 'SCALE_SET', 'train_config'] + sorted(KINDS)
