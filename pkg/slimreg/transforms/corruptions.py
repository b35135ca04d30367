import torch

CORRUPTIONS = ('gauss_noise', 'brightness', 'contrast')

# index 0 is the identity, 1..5 are the severities
SEVERITY_TABLES = {
    'gauss_noise': (0., .08, .12, .18, .26, .38),
    'brightness': (0., .1, .2, .3, .4, .5),
    'contrast': (1., .4, .3, .2, .1, .05),
}


def corrupt(x, kind, severity, rng, valid_range=(0., 1.)):
    '''
    Apply a synthetic corruption to an [N, C, H, W] batch in pixel space.

    gauss_noise adds N(0, sigma^2) noise, brightness adds a constant offset and
    contrast scales every image around its own mean. The result is clipped to
    ``valid_range``. Severity 0 returns the input unchanged.

    Args:
        x (torch.Tensor): Images with values in ``valid_range``.
        kind (str): One of CORRUPTIONS.
        severity (int): 0..5.
        rng (numpy.random.Generator): Source of the noise.
        valid_range (tuple): (lo, hi) pixel range.
    '''
    if kind not in SEVERITY_TABLES:
        raise ValueError("unknown corruption: " + str(kind))
    if not 0 <= severity < len(SEVERITY_TABLES[kind]):
        raise ValueError("severity must lie in 0..5, got {}".format(severity))
    if severity == 0:
        return x
    level = SEVERITY_TABLES[kind][severity]
    if kind == 'gauss_noise':
        noise = torch.from_numpy(rng.normal(0., level, size=tuple(x.shape))).to(x.dtype)
        out = x + noise
    elif kind == 'brightness':
        out = x + level
    else:
        mean = x.mean(dim=(1, 2, 3), keepdim=True)
        out = (x - mean) * level + mean
    return out.clamp(*valid_range)
