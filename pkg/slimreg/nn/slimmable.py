import math
from dataclasses import asdict, dataclass
import torch
from torch import nn
from slimreg.core import (
    BNMode,
    BatchNormState,
    DimensionError,
    WidthError,
    batchnorm,
    conv2d,
    global_avg_pool,
    linear,
    relu,
)
from .subnet import Width

LAYER_KINDS = ('conv', 'bn', 'linear', 'relu', 'pool', 'residual_block')


def channels_at(base, width, lower_bound=0.):
    '''
    Number of leading channels kept from a layer with ``base`` channels at ``width``.

    Computed as max(1, round_half_up(width * base)), so it is monotone in
    width and equals ``base`` at width 1.
    '''
    if base < 1:
        raise WidthError("base channel count must be >= 1, got {}".format(base))
    if not 0 < width <= 1 or width < lower_bound:
        raise WidthError("width {} outside [{}, 1]".format(width, lower_bound))
    return max(1, int(math.floor(width * base + 0.5)))


@dataclass(frozen=True)
class LayerSpec:
    '''
    One layer of a slimmable model.

    ``base_in``/``base_out`` are the full-width channel counts. ``scale_in`` and
    ``scale_out`` say whether the corresponding dimension shrinks with width.
    '''
    kind: str
    base_in: int = 0
    base_out: int = 0
    kernel: int = 1
    stride: int = 1
    padding: int = 0
    bias: bool = False
    scale_in: bool = True
    scale_out: bool = True

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise DimensionError("unknown layer kind: " + str(self.kind))


@dataclass(frozen=True)
class ModelSpec:
    name: str
    layers: tuple
    in_channels: int
    num_classes: int

    def __post_init__(self):
        self.validate()

    def validate(self):
        '''Check channel counts and scaling flags agree along the layer chain.'''
        channels, scalable = self.in_channels, False
        for index, layer in enumerate(self.layers):
            if layer.kind in ('relu', 'pool'):
                continue
            if layer.base_in != channels or layer.scale_in != scalable:
                raise DimensionError(
                    "layer {} ({}) expects {} channels (scalable={}), previous layer gives {} (scalable={})".format(
                        index, layer.kind, layer.base_in, layer.scale_in, channels, scalable)
                )
            if layer.kind == 'bn' and (layer.base_out != layer.base_in or layer.scale_out != layer.scale_in):
                raise DimensionError("bn layer {} must preserve its channels".format(index))
            channels, scalable = layer.base_out, layer.scale_out
        if channels != self.num_classes or scalable:
            raise DimensionError("the classifier must output {} fixed classes".format(self.num_classes))

    @property
    def num_blocks(self):
        return sum(1 for layer in self.layers if layer.kind == 'residual_block')

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        layers = tuple(LayerSpec(**layer) for layer in data['layers'])
        return cls(data['name'], layers, data['in_channels'], data['num_classes'])


def _channels(base, scalable, width):
    return channels_at(base, width) if scalable else base


class SlimmableConv2d(nn.Conv2d):
    '''
    A convolution whose leading input/output channels can be used on their own.

    Parameters always keep their full shape; a sub-network at width w uses the
    prefix slice ``weight[:channels_at(c_out, w), :channels_at(c_in, w)]``.
    Slices are views, so sub-network gradients land in the shared buffers.
    '''
    def __init__(self, in_channels, out_channels, kernel_size, stride=1, padding=0,
                 bias=False, scale_in=True, scale_out=True):
        super().__init__(in_channels, out_channels, kernel_size, stride=stride, padding=padding, bias=bias)
        self.scale_in = scale_in
        self.scale_out = scale_out

    def slice_params(self, width):
        c_out = _channels(self.out_channels, self.scale_out, width)
        c_in = _channels(self.in_channels, self.scale_in, width)
        params = {'weight': self.weight[:c_out, :c_in]}
        if self.bias is not None:
            params['bias'] = self.bias[:c_out]
        return params

    def forward(self, x, width=1., bn_mode=None):  # pylint: disable=arguments-differ
        params = self.slice_params(width)
        return conv2d(x, params['weight'], params.get('bias'), stride=self.stride[0], padding=self.padding[0])


class SlimmableBatchNorm2d(nn.BatchNorm2d):
    '''Batch normalization over the leading channels; one shared set of statistics for all widths.'''
    def __init__(self, num_features, scalable=True, eps=1e-5, momentum=0.1):
        super().__init__(num_features, eps=eps, momentum=momentum)
        self.scalable = scalable

    def slice_params(self, width):
        c = _channels(self.num_features, self.scalable, width)
        return {'weight': self.weight[:c], 'bias': self.bias[:c]}

    def slice_state(self, width):
        c = _channels(self.num_features, self.scalable, width)
        return BatchNormState(self.running_mean[:c], self.running_var[:c], self.momentum, self.eps)

    def forward(self, x, width=1., bn_mode=BNMode.TRAIN_TRACKING):  # pylint: disable=arguments-differ
        params = self.slice_params(width)
        return batchnorm(x, params['weight'], params['bias'], self.slice_state(width), bn_mode)


class SlimmableLinear(nn.Linear):
    def __init__(self, in_features, out_features, bias=True, scale_in=True, scale_out=False):
        super().__init__(in_features, out_features, bias=bias)
        self.scale_in = scale_in
        self.scale_out = scale_out

    def slice_params(self, width):
        d_out = _channels(self.out_features, self.scale_out, width)
        d_in = _channels(self.in_features, self.scale_in, width)
        params = {'weight': self.weight[:d_out, :d_in]}
        if self.bias is not None:
            params['bias'] = self.bias[:d_out]
        return params

    def forward(self, x, width=1., bn_mode=None):  # pylint: disable=arguments-differ
        params = self.slice_params(width)
        return linear(x, params['weight'], params.get('bias'))


class ReLU(nn.Module):
    def forward(self, x, width=1., bn_mode=None):  # pylint: disable=unused-argument
        return relu(x)


class GlobalAvgPool(nn.Module):
    '''Averages each channel over space, [N, C, H, W] -> [N, C].'''
    def forward(self, x, width=1., bn_mode=None):  # pylint: disable=unused-argument
        return global_avg_pool(x)


class ResidualBlock(nn.Module):
    '''
    Two 3x3 convolutions with batch norm plus a shortcut.

    Both convolutions (and the projection shortcut, if any) are sliced with the
    same width, so the residual addition is always shape-valid. A dropped block
    returns its shortcut path only, which is the identity when the block keeps
    its shape.
    '''
    def __init__(self, in_channels, out_channels, stride=1, scalable=True):
        super().__init__()
        self.conv1 = SlimmableConv2d(in_channels, out_channels, 3, stride=stride, padding=1,
                                     scale_in=scalable, scale_out=scalable)
        self.bn1 = SlimmableBatchNorm2d(out_channels, scalable=scalable)
        self.conv2 = SlimmableConv2d(out_channels, out_channels, 3, padding=1,
                                     scale_in=scalable, scale_out=scalable)
        self.bn2 = SlimmableBatchNorm2d(out_channels, scalable=scalable)
        self.shortcut = None
        if stride != 1 or in_channels != out_channels:
            self.shortcut = nn.ModuleList([
                SlimmableConv2d(in_channels, out_channels, 1, stride=stride,
                                scale_in=scalable, scale_out=scalable),
                SlimmableBatchNorm2d(out_channels, scalable=scalable),
            ])

    def slice_params(self, width):
        params = {}
        for name, module in self.named_modules():
            if module is not self and hasattr(module, 'slice_params'):
                for key, value in module.slice_params(width).items():
                    params[name + '.' + key] = value
        return params

    def forward(self, x, width=1., bn_mode=BNMode.TRAIN_TRACKING, keep=True, residual_scale=None):
        # pylint: disable=arguments-differ
        identity = x
        if self.shortcut is not None:
            conv, bn = self.shortcut
            identity = bn(conv(x, width), width, bn_mode)
        if not keep:
            return relu(identity)
        out = relu(self.bn1(self.conv1(x, width), width, bn_mode))
        out = self.bn2(self.conv2(out, width), width, bn_mode)
        if residual_scale is not None:
            out = out * residual_scale
        return relu(out + identity)


def build_layer(spec):
    if spec.kind == 'conv':
        return SlimmableConv2d(spec.base_in, spec.base_out, spec.kernel, stride=spec.stride,
                               padding=spec.padding, bias=spec.bias,
                               scale_in=spec.scale_in, scale_out=spec.scale_out)
    if spec.kind == 'bn':
        return SlimmableBatchNorm2d(spec.base_in, scalable=spec.scale_in)
    if spec.kind == 'linear':
        return SlimmableLinear(spec.base_in, spec.base_out, bias=spec.bias,
                               scale_in=spec.scale_in, scale_out=spec.scale_out)
    if spec.kind == 'relu':
        return ReLU()
    if spec.kind == 'pool':
        return GlobalAvgPool()
    return ResidualBlock(spec.base_in, spec.base_out, stride=spec.stride,
                         scalable=spec.scale_in and spec.scale_out)


class SlimmableNetwork(nn.Module):
    '''
    A network built from a ModelSpec whose sub-networks share one parameter store.

    Args:
        spec (ModelSpec): The layer graph at full width.
        dtype (torch.dtype, optional): Parameter dtype. Defaults to the current default dtype.
    '''
    def __init__(self, spec, dtype=None):
        super().__init__()
        self.spec = spec
        self.layers = nn.ModuleList([build_layer(layer) for layer in spec.layers])
        if dtype is not None:
            self.to(dtype)

    @property
    def num_blocks(self):
        return self.spec.num_blocks

    def default_bn_mode(self):
        return BNMode.TRAIN_TRACKING if self.training else BNMode.EVAL

    def forward(self, x, subnet=None, bn_mode=None):  # pylint: disable=arguments-differ
        subnet = subnet or Width(1.)
        subnet.check(self)
        bn_mode = BNMode(bn_mode) if bn_mode is not None else self.default_bn_mode()
        width = subnet.width
        block = 0
        for layer, layer_spec in zip(self.layers, self.spec.layers):
            if layer_spec.kind == 'residual_block':
                keep, scale = subnet.block(block)
                x = layer(x, width, bn_mode, keep=keep, residual_scale=scale)
                block += 1
            else:
                x = layer(x, width, bn_mode)
        return x

    def bn_buffers(self):
        '''Running statistics of every batch norm layer, keyed by layer path.'''
        return {
            name: buffer for name, buffer in self.named_buffers()
            if name.endswith('running_mean') or name.endswith('running_var')
        }
