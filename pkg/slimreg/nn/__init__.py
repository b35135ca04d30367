from .slimmable import (
    LAYER_KINDS,
    LayerSpec,
    ModelSpec,
    SlimmableNetwork,
    SlimmableConv2d,
    SlimmableBatchNorm2d,
    SlimmableLinear,
    ReLU,
    GlobalAvgPool,
    ResidualBlock,
    channels_at,
)
from .subnet import (
    SubnetSpec,
    Width,
    Depth,
    forward_subnet,
    slice_params,
    sample_subnet_widths,
    sample_depth_mask,
    survival_probabilities,
)
from .models import MODELS, build_model, small_cnn, wide_resnet
from .checkpoint import (
    Checkpointer,
    DummyCheckpointer,
    EpochCheckpointer,
    save_checkpoint,
    load_checkpoint,
    read_manifest,
)

__all__ = [
    'LAYER_KINDS',
    'LayerSpec',
    'ModelSpec',
    'SlimmableNetwork',
    'SlimmableConv2d',
    'SlimmableBatchNorm2d',
    'SlimmableLinear',
    'ReLU',
    'GlobalAvgPool',
    'ResidualBlock',
    'channels_at',
    'SubnetSpec',
    'Width',
    'Depth',
    'forward_subnet',
    'slice_params',
    'sample_subnet_widths',
    'sample_depth_mask',
    'survival_probabilities',
    'MODELS',
    'build_model',
    'small_cnn',
    'wide_resnet',
    'Checkpointer',
    'DummyCheckpointer',
    'EpochCheckpointer',
    'save_checkpoint',
    'load_checkpoint',
    'read_manifest',
]
