'''Mixed-sample augmentations (Mixup, CutMix) as replayable batch-level specs.'''
import math
from dataclasses import dataclass
import numpy as np
import torch

MIX_METHODS = ('none', 'mixup', 'cutmix')


@dataclass(frozen=True)
class MixSpec:
    '''
    One draw of a batch-level augmentation.

    ``lam`` is the weight of the original labels; for CutMix it is already
    adjusted to 1 - box_area / (H * W). ``box`` is (x1, y1, x2, y2) with x
    along the width axis. ``permutation`` pairs every sample with its donor.
    '''
    method: str = 'none'
    lam: float = 1.
    box: tuple = None
    permutation: tuple = None

    def __post_init__(self):
        if self.method not in MIX_METHODS:
            raise ValueError("unknown mix method: " + str(self.method))
        if not 0 <= self.lam <= 1:
            raise ValueError("lambda must lie in [0, 1], got {}".format(self.lam))

    def _donor(self, x):
        return x[torch.as_tensor(self.permutation, dtype=torch.long)]

    def apply_images(self, x):
        if self.method == 'mixup':
            return self.lam * x + (1 - self.lam) * self._donor(x)
        if self.method == 'cutmix':
            x1, y1, x2, y2 = self.box
            mixed = x.clone()
            mixed[:, :, y1:y2, x1:x2] = self._donor(x)[:, :, y1:y2, x1:x2]
            return mixed
        return x

    def apply_labels(self, labels):
        '''Mix [N, K] label distributions; rows keep summing to one.'''
        if self.method == 'none':
            return labels
        return self.lam * labels + (1 - self.lam) * self._donor(labels)


def cutmix_box(height, width, lam, center):
    '''
    The CutMix box for a drawn lambda centered at ``center`` = (cx, cy).

    Side lengths are round_half_up(W * sqrt(1 - lam)) and
    round_half_up(H * sqrt(1 - lam)); the box is clipped to the image.
    '''
    cut = math.sqrt(1. - lam)
    cut_w = int(math.floor(width * cut + 0.5))
    cut_h = int(math.floor(height * cut + 0.5))
    cx, cy = center
    x1 = int(np.clip(cx - cut_w // 2, 0, width))
    x2 = int(np.clip(cx - cut_w // 2 + cut_w, 0, width))
    y1 = int(np.clip(cy - cut_h // 2, 0, height))
    y2 = int(np.clip(cy - cut_h // 2 + cut_h, 0, height))
    return x1, y1, x2, y2


def sample_mix(rng, method, batch_size, height, width, beta=1., prob=1.):
    '''
    Draw a MixSpec.

    Args:
        rng (numpy.random.Generator): The random stream.
        method (str): "none", "mixup" or "cutmix".
        batch_size (int): Number of samples to pair.
        height (int): Image height.
        width (int): Image width.
        beta (float): Lambda is drawn from Beta(beta, beta).
        prob (float): Probability that the augmentation is applied at all.

    Returns:
        MixSpec: The drawn augmentation (method "none" when not applied).
    '''
    if method not in MIX_METHODS:
        raise ValueError("unknown mix method: " + str(method))
    if method == 'none' or rng.random() >= prob:
        return MixSpec()
    permutation = tuple(int(i) for i in rng.permutation(batch_size))
    lam = float(rng.beta(beta, beta))
    if method == 'mixup':
        return MixSpec('mixup', lam, None, permutation)
    center = (int(rng.integers(width)), int(rng.integers(height)))
    box = cutmix_box(height, width, lam, center)
    area = (box[2] - box[0]) * (box[3] - box[1])
    return MixSpec('cutmix', 1. - area / (height * width), box, permutation)


def mixup(batch, labels_onehot, lam, permutation):
    '''x' = lam * x + (1 - lam) * x[perm], and the same for the labels.'''
    spec = MixSpec('mixup', lam, None, tuple(permutation))
    return spec.apply_images(batch), spec.apply_labels(labels_onehot)


def cutmix(batch, labels_onehot, rng, beta=1.):
    '''
    Paste a box from a shuffled copy of the batch into every image.

    Returns:
        (torch.Tensor, torch.Tensor, float): Mixed images, mixed labels and the
        adjusted lambda 1 - box_area / (H * W).
    '''
    n, _, height, width = batch.shape
    spec = sample_mix(rng, 'cutmix', n, height, width, beta=beta)
    return spec.apply_images(batch), spec.apply_labels(labels_onehot), spec.lam
