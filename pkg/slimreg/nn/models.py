from .slimmable import LayerSpec, ModelSpec, SlimmableNetwork


def small_cnn(num_classes=10, in_channels=3, widths=(32, 64, 128)):
    '''
    Three conv-bn-relu stages followed by global pooling and a classifier.

    With the default widths and 3 input channels this has roughly 95K parameters.
    Global pooling makes the network accept any input resolution.
    '''
    layers = []
    channels, scalable = in_channels, False
    for i, width in enumerate(widths):
        layers += [
            LayerSpec('conv', channels, width, kernel=3, stride=1 if i == 0 else 2, padding=1,
                      scale_in=scalable, scale_out=True),
            LayerSpec('bn', width, width),
            LayerSpec('relu'),
        ]
        channels, scalable = width, True
    layers += [
        LayerSpec('pool'),
        LayerSpec('linear', channels, num_classes, bias=True, scale_in=True, scale_out=False),
    ]
    return ModelSpec('small_cnn', tuple(layers), in_channels, num_classes)


def wide_resnet(num_classes=10, in_channels=3, depth=16, widen_factor=1, base=16):
    '''
    A WideResNet-style residual network at desk scale.

    ``depth`` must satisfy (depth - 4) % 6 == 0; each of the three groups has
    (depth - 4) / 6 residual blocks with 16k, 32k and 64k channels.
    '''
    if (depth - 4) % 6 != 0:
        raise ValueError("wide_resnet depth must be 6n + 4, got {}".format(depth))
    blocks_per_group = (depth - 4) // 6
    layers = [
        LayerSpec('conv', in_channels, base, kernel=3, padding=1, scale_in=False, scale_out=True),
        LayerSpec('bn', base, base),
        LayerSpec('relu'),
    ]
    channels = base
    for group, multiplier in enumerate((1, 2, 4)):
        width = base * multiplier * widen_factor
        for i in range(blocks_per_group):
            stride = 2 if group > 0 and i == 0 else 1
            layers.append(LayerSpec('residual_block', channels, width, kernel=3, stride=stride))
            channels = width
    layers += [
        LayerSpec('pool'),
        LayerSpec('linear', channels, num_classes, bias=True, scale_in=True, scale_out=False),
    ]
    return ModelSpec('wide_resnet', tuple(layers), in_channels, num_classes)


MODELS = {
    'small_cnn': small_cnn,
    'wide_resnet': wide_resnet,
}


def build_model(name, dtype=None, **kwargs):
    '''Construct a SlimmableNetwork from one of the named architecture presets.'''
    if name not in MODELS:
        raise ValueError("Unknown model preset: " + str(name))
    return SlimmableNetwork(MODELS[name](**kwargs), dtype=dtype)
