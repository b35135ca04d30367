from .geometric import (
    IDENTITY,
    TransformSpec,
    apply_transform,
    random_scale,
    resize_bilinear,
    rotate90,
    sample_transform,
)
from .mixing import MIX_METHODS, MixSpec, cutmix, cutmix_box, mixup, sample_mix
from .compose import compose
from .corruptions import CORRUPTIONS, SEVERITY_TABLES, corrupt

__all__ = [
    'IDENTITY',
    'TransformSpec',
    'apply_transform',
    'random_scale',
    'resize_bilinear',
    'rotate90',
    'sample_transform',
    'MIX_METHODS',
    'MixSpec',
    'cutmix',
    'cutmix_box',
    'mixup',
    'sample_mix',
    'compose',
    'CORRUPTIONS',
    'SEVERITY_TABLES',
    'corrupt',
]
