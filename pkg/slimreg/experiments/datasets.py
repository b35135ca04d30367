'''In-memory image datasets: IDX ingestion, synthetic data and low-data splits.'''
from dataclasses import dataclass
import numpy as np
import torch
from slimreg.core import ConfigError, DatasetError, IdxCountMismatchError, IdxMagicError, IdxTruncatedError, tensor

IDX_UBYTE = 0x08
IDX_LABELS = 0x00000801
IDX_IMAGES = 0x00000803
IDX_IMAGES_CHANNELS = 0x00000804


class ImageDataset:
    '''
    Normalized images with integer labels, held in memory.

    Args:
        images (torch.Tensor): [N, C, H, W] normalized images.
        labels (torch.Tensor): [N] labels in [0, num_classes).
        num_classes (int): Number of classes.
        mean (tuple): Per-channel mean subtracted from [0, 1] pixels.
        std (tuple): Per-channel standard deviation the pixels were divided by.
    '''
    def __init__(self, images, labels, num_classes, mean, std):
        if len(images) != len(labels):
            raise DatasetError("{} images but {} labels".format(len(images), len(labels)))
        if len(labels) and (labels.min() < 0 or labels.max() >= num_classes):
            raise DatasetError("labels must lie in [0, {})".format(num_classes))
        self.images = images
        self.labels = labels
        self.num_classes = num_classes
        self.mean = tuple(float(m) for m in mean)
        self.std = tuple(float(s) for s in std)

    @classmethod
    def from_pixels(cls, pixels, labels, num_classes=None, mean=None, std=None, dtype=None):
        '''
        Build a dataset from uint8 pixels of shape [N, H, W] or [N, C, H, W].

        Missing ``mean`` and ``std`` are computed per channel from the pixels.
        '''
        pixels = np.asarray(pixels)
        if pixels.ndim == 3:
            pixels = pixels[:, None]
        if pixels.ndim != 4:
            raise DatasetError("images must have 3 or 4 dimensions, got {}".format(pixels.ndim))
        labels = np.asarray(labels).astype(np.int64)
        if num_classes is None:
            num_classes = int(labels.max()) + 1 if len(labels) else 1
        scaled = pixels.astype(np.float64) / 255.
        if mean is None:
            mean = scaled.mean(axis=(0, 2, 3)) if len(scaled) else np.zeros(scaled.shape[1])
        if std is None:
            std = scaled.std(axis=(0, 2, 3)) if len(scaled) else np.ones(scaled.shape[1])
            std = np.where(std > 0, std, 1.)
        mean, std = np.broadcast_to(mean, scaled.shape[1]), np.broadcast_to(std, scaled.shape[1])
        normalized = (scaled - mean.reshape(1, -1, 1, 1)) / std.reshape(1, -1, 1, 1)
        images = torch.from_numpy(normalized).to(dtype or torch.get_default_dtype())
        return cls(images, torch.from_numpy(labels), num_classes, mean, std)

    def __len__(self):
        return len(self.labels)

    @property
    def channels(self):
        return self.images.shape[1]

    @property
    def valid_range(self):
        '''Per-channel (lo, hi) of normalized images whose pixels lie in [0, 1].'''
        lo = tuple(-m / s for m, s in zip(self.mean, self.std))
        hi = tuple((1. - m) / s for m, s in zip(self.mean, self.std))
        return lo, hi

    def _stats(self, x):
        shape = (1, -1, 1, 1)
        return tensor(self.mean, dtype=x.dtype).view(shape), tensor(self.std, dtype=x.dtype).view(shape)

    def normalize(self, pixels):
        mean, std = self._stats(pixels)
        return (pixels - mean) / std

    def denormalize(self, images):
        mean, std = self._stats(images)
        return images * std + mean

    def subset(self, indices):
        indices = torch.as_tensor(np.asarray(indices, dtype=np.int64))
        return ImageDataset(self.images[indices], self.labels[indices], self.num_classes, self.mean, self.std)

    def to(self, dtype):
        return ImageDataset(self.images.to(dtype), self.labels, self.num_classes, self.mean, self.std)

    def batches(self, batch_size, rng=None):
        '''
        Yield (images, labels) batches, shuffled by ``rng`` if one is given.
        The last batch may be smaller.
        '''
        order = rng.permutation(len(self)) if rng is not None else np.arange(len(self))
        order = torch.as_tensor(order, dtype=torch.long)
        for start in range(0, len(self), batch_size):
            index = order[start:start + batch_size]
            yield self.images[index], self.labels[index]


def _read_idx(path, magics):
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as error:
        raise DatasetError("cannot read {}: {}".format(path, error)) from error
    if len(data) < 4:
        raise IdxTruncatedError("{}: file ends inside the header".format(path))
    magic = int(np.frombuffer(data[:4], dtype='>u4')[0])
    if magic not in magics:
        raise IdxMagicError("{}: magic number 0x{:08x}, expected one of {}".format(
            path, magic, ', '.join('0x{:08x}'.format(m) for m in magics)))
    ndim = magic & 0xff
    header = 4 + 4 * ndim
    if len(data) < header:
        raise IdxTruncatedError("{}: file ends inside the header".format(path))
    shape = tuple(int(d) for d in np.frombuffer(data[4:header], dtype='>u4'))
    size = int(np.prod(shape))
    if len(data) < header + size:
        raise IdxTruncatedError("{}: expected {} data bytes, found {}".format(path, size, len(data) - header))
    return np.frombuffer(data[header:header + size], dtype=np.uint8).reshape(shape)


def read_idx_images(path):
    '''Images as uint8 [N, H, W] (magic 0x00000803) or [N, C, H, W] (magic 0x00000804).'''
    return _read_idx(path, (IDX_IMAGES, IDX_IMAGES_CHANNELS))


def read_idx_labels(path):
    return _read_idx(path, (IDX_LABELS,))


def write_idx(path, array):
    '''
    Write an unsigned-byte IDX file.

    Args:
        path (str): Destination file.
        array (numpy.ndarray): uint8 array with 1 (labels), 3 or 4 (images) dimensions.
    '''
    array = np.asarray(array)
    if array.dtype != np.uint8:
        raise DatasetError("IDX export supports uint8 arrays only, got {}".format(array.dtype))
    if array.ndim not in (1, 3, 4):
        raise DatasetError("IDX export supports 1, 3 or 4 dimensions, got {}".format(array.ndim))
    header = np.array([(IDX_UBYTE << 8) | array.ndim] + list(array.shape), dtype='>u4')
    with open(path, 'wb') as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(array).tobytes())


@dataclass(frozen=True)
class DatasetDescriptor:
    '''
    An IDX image file, its label file and how to normalize the images.

    ``mean`` and ``std`` default to the statistics of the images themselves.
    '''
    images: str
    labels: str
    num_classes: int = None
    mean: tuple = None
    std: tuple = None


def load_idx_dataset(descriptor, dtype=None):
    '''
    Load an IDX image/label pair into an ImageDataset.

    Raises:
        IdxMagicError: A file does not start with the expected magic number.
        IdxTruncatedError: A file is shorter than its header announces.
        IdxCountMismatchError: Image and label counts differ.
    '''
    pixels = read_idx_images(descriptor.images)
    labels = read_idx_labels(descriptor.labels)
    if len(pixels) != len(labels):
        raise IdxCountMismatchError("{} has {} images but {} has {} labels".format(
            descriptor.images, len(pixels), descriptor.labels, len(labels)))
    return ImageDataset.from_pixels(pixels, labels, descriptor.num_classes, descriptor.mean, descriptor.std,
                                    dtype=dtype)


@dataclass(frozen=True)
class SynthSpec:
    '''
    A synthetic classification problem: oriented stripes plus a colored blob per class.

    Every image shows the pattern of one class at a random strength, blended
    with a weaker pattern of another class (relative strength up to
    ``distractor``) over a smooth background gradient and pixel noise of
    standard deviation ``noise``. A ``confusion`` fraction of the images shows
    the pattern of a class other than its label, which caps the attainable
    accuracy; see synth_ceiling.
    '''
    classes: int = 10
    n: int = 1000
    height: int = 32
    width: int = 32
    channels: int = 3
    seed: int = 0
    noise: float = 0.12
    distractor: float = 0.6
    confusion: float = 0.03

    def __post_init__(self):
        if self.classes < 1 or self.n < 0:
            raise ConfigError("synthetic dataset needs classes >= 1 and n >= 0")
        if self.noise < 0:
            raise ConfigError("synthetic noise must be >= 0, got {}".format(self.noise))
        if not 0 <= self.distractor < 1:
            raise ConfigError("synthetic distractor must lie in [0, 1), got {}".format(self.distractor))
        if not 0 <= self.confusion < 1:
            raise ConfigError("synthetic confusion must lie in [0, 1), got {}".format(self.confusion))


def _synth_classes(spec, rng):
    '''Balanced labels and the class whose pattern each image shows.'''
    labels = rng.permutation(np.arange(spec.n) % spec.classes)
    confused = rng.random(spec.n) < spec.confusion
    cues = labels.copy()
    if spec.classes > 1:
        cues[confused] = (labels[confused] + rng.integers(1, spec.classes, size=int(confused.sum()))) % spec.classes
    return labels, cues


def _class_pattern(spec, k, rows, cols, rng):
    fraction = k / spec.classes
    angle = np.pi * fraction + rng.normal(0, 0.05)
    phase = rng.uniform(0, 2 * np.pi)
    stripes = np.sin(3 * np.pi * (cols * np.cos(angle) + rows * np.sin(angle)) + phase)
    center = 0.5 * np.array([np.cos(2 * np.pi * fraction), np.sin(2 * np.pi * fraction)])
    center += rng.normal(0, 0.1, size=2)
    blob = np.exp(-((cols - center[0]) ** 2 + (rows - center[1]) ** 2) / 0.1)
    tints = 0.5 + 0.3 * np.cos(2 * np.pi * (fraction + np.arange(spec.channels) / spec.channels))
    return np.stack([0.2 * stripes * tint + 0.3 * blob * (tint - 0.5) for tint in tints])


def synth_pixels(spec):
    '''
    uint8 images and labels of a synthetic dataset.

    Each class has its own stripe orientation, blob position and color tint;
    orientation, phase, position, strength, the blended distractor class, the
    background and pixel noise vary per sample. Classes are balanced to within
    one sample and the result depends only on ``spec``.
    '''
    rng = np.random.default_rng(spec.seed)
    labels, cues = _synth_classes(spec, rng)
    rows, cols = np.meshgrid(np.linspace(-1, 1, spec.height), np.linspace(-1, 1, spec.width), indexing='ij')
    pixels = np.empty((spec.n, spec.channels, spec.height, spec.width), dtype=np.uint8)
    for i, cue in enumerate(cues):
        strength = rng.uniform(0.5, 1.)
        image = strength * _class_pattern(spec, cue, rows, cols, rng)
        if spec.classes > 1 and spec.distractor > 0:
            other = (cue + rng.integers(1, spec.classes)) % spec.classes
            image += strength * rng.uniform(0, spec.distractor) * _class_pattern(spec, other, rows, cols, rng)
        slope = rng.uniform(0, 2 * np.pi)
        image += 0.5 + 0.1 * (cols * np.cos(slope) + rows * np.sin(slope))
        image += rng.normal(0, spec.noise, size=image.shape)
        pixels[i] = np.clip(np.round(image * 255), 0, 255).astype(np.uint8)
    return pixels, labels.astype(np.uint8 if spec.classes <= 256 else np.int64)


def synth_ceiling(spec):
    '''
    Top-1 accuracy (percent) of a classifier that recognizes every pattern of
    ``spec``: the share of images whose pattern matches their label.
    '''
    labels, cues = _synth_classes(spec, np.random.default_rng(spec.seed))
    if spec.n == 0:
        return 100.
    return 100. * float(np.mean(labels == cues))


def synth_dataset(spec, mean=None, std=None, dtype=None):
    '''The synthetic dataset described by ``spec`` as an ImageDataset.'''
    pixels, labels = synth_pixels(spec)
    return ImageDataset.from_pixels(pixels, labels, spec.classes, mean, std, dtype=dtype)


def split_low_data(train, test, labels_per_run, seed):
    '''
    Keep a class-uniform labeled subset of ``train``; the rest becomes the unlabeled pool.

    With K classes every class gets labels_per_run // K samples and the first
    labels_per_run % K classes one more.

    Returns:
        (ImageDataset, ImageDataset, ImageDataset): labeled, unlabeled and the
        untouched test set.
    '''
    if not 0 < labels_per_run <= len(train):
        raise ConfigError("label budget {} outside (0, {}]".format(labels_per_run, len(train)))
    rng = np.random.default_rng(seed)
    labels = train.labels.numpy()
    per_class, extra = divmod(labels_per_run, train.num_classes)
    chosen = []
    for k in range(train.num_classes):
        candidates = np.flatnonzero(labels == k)
        count = per_class + (1 if k < extra else 0)
        if count > len(candidates):
            raise ConfigError("class {} has {} samples, {} requested".format(k, len(candidates), count))
        chosen.append(rng.choice(candidates, size=count, replace=False))
    labeled = np.sort(np.concatenate(chosen))
    unlabeled = np.setdiff1d(np.arange(len(train)), labeled)
    return train.subset(labeled), train.subset(unlabeled), test
