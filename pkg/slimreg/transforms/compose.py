from .geometric import apply_transform


def compose(mix, transform, x):
    '''
    T(f(x)): the batch-level augmentation ``mix`` first, then the per-sub-network
    ``transform``. The full network sees f(x) only, and the mixed labels depend
    on ``mix`` alone.
    '''
    return apply_transform(transform, mix.apply_images(x))
