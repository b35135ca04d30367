from dataclasses import dataclass
from torch.nn import functional as F
import torch


@dataclass(frozen=True)
class TransformSpec:
    '''
    One draw of the input transformation given to a sub-network.

    ``rotation`` is a number of quarter turns (applied first); ``size`` is the
    target side length of the square output (None keeps the input size).
    '''
    size: int = None
    rotation: int = 0

    def __post_init__(self):
        if self.rotation not in (0, 1, 2, 3):
            raise ValueError("rotation must be a number of quarter turns in 0..3")
        if self.size is not None and self.size < 1:
            raise ValueError("target size must be >= 1")

    @property
    def is_identity(self):
        return self.size is None and self.rotation == 0


IDENTITY = TransformSpec()


def resize_bilinear(x, height, width):
    '''
    Bilinear resize of an [N, C, H, W] batch.

    Output pixel (i, j) samples the input at ((i + 0.5) * H / height - 0.5,
    (j + 0.5) * W / width - 0.5), clamped to the image edge. Resizing to the
    input size returns the input unchanged.
    '''
    if height < 1 or width < 1:
        raise ValueError("target size must be >= 1")
    if (height, width) == tuple(x.shape[2:]):
        return x
    return F.interpolate(x, size=(height, width), mode='bilinear', align_corners=False)


def rotate90(x, k):
    '''
    Rotate every image of an [N, C, H, W] batch by k quarter turns.

    This is an exact index permutation; with k = 1 the image [[a, b], [c, d]]
    becomes [[c, a], [d, b]].
    '''
    k = k % 4
    if k == 0:
        return x
    return torch.rot90(x, k, dims=(3, 2))


def apply_transform(spec, x):
    '''Rotate, then resize, according to ``spec``.'''
    x = rotate90(x, spec.rotation)
    if spec.size is not None:
        x = resize_bilinear(x, spec.size, spec.size)
    return x


def sample_transform(rng, scale_set=(), rotation=False, writer=None):
    '''
    Draw a TransformSpec: a size uniformly from ``scale_set`` (if non-empty)
    and a quarter-turn count uniformly from 0..3 (if ``rotation``).
    A drawn size is logged to ``writer`` as ``transform/scale``.
    '''
    size = int(scale_set[rng.integers(len(scale_set))]) if scale_set else None
    quarter_turns = int(rng.integers(4)) if rotation else 0
    if size is not None and writer is not None:
        writer.add_scalar('transform/scale', size)
    return TransformSpec(size, quarter_turns)


def random_scale(x, scale_set, rng, writer=None):
    '''Resize to a size drawn uniformly from ``scale_set``; the choice is logged as ``transform/scale``.'''
    return apply_transform(sample_transform(rng, scale_set, writer=writer), x)
