from .errors import (
    SlimregError,
    DimensionError,
    LabelError,
    DistributionError,
    BackwardError,
    WidthError,
    SubnetError,
    ConfigError,
    DatasetError,
    IdxMagicError,
    IdxTruncatedError,
    IdxCountMismatchError,
    CheckpointError,
)
from .tensor import (
    PRECISIONS,
    BNMode,
    BatchNormState,
    set_precision,
    tensor,
    conv2d,
    batchnorm,
    linear,
    relu,
    global_avg_pool,
    softmax_cross_entropy,
    soft_target_loss,
    one_hot,
    backward,
)
from .gradcheck import grad_check, GradCheckReport

__all__ = [
    'SlimregError',
    'DimensionError',
    'LabelError',
    'DistributionError',
    'BackwardError',
    'WidthError',
    'SubnetError',
    'ConfigError',
    'DatasetError',
    'IdxMagicError',
    'IdxTruncatedError',
    'IdxCountMismatchError',
    'CheckpointError',
    'PRECISIONS',
    'BNMode',
    'BatchNormState',
    'set_precision',
    'tensor',
    'conv2d',
    'batchnorm',
    'linear',
    'relu',
    'global_avg_pool',
    'softmax_cross_entropy',
    'soft_target_loss',
    'one_hot',
    'backward',
    'grad_check',
    'GradCheckReport',
]
