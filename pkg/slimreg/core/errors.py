class SlimregError(Exception):
    '''Base class for every error raised by slimreg.'''


class DimensionError(SlimregError):
    '''Raised when the shapes given to a primitive operation do not agree.'''


class LabelError(SlimregError):
    '''Raised when a class label lies outside [0, num_classes).'''


class DistributionError(SlimregError):
    '''Raised when a target distribution is not normalized.'''


class BackwardError(SlimregError):
    '''Raised when backward is requested from a non-scalar tensor.'''


class SubnetError(SlimregError):
    '''Raised when a sub-network spec does not fit the model.'''


class ConfigError(SlimregError):
    '''Raised for invalid or unknown configuration values.'''


class WidthError(ConfigError):
    '''Raised when a width multiplier lies outside [lower_bound, 1].'''


class DatasetError(SlimregError):
    pass


class IdxMagicError(DatasetError):
    pass


class IdxTruncatedError(DatasetError):
    pass


class IdxCountMismatchError(DatasetError):
    pass


class CheckpointError(SlimregError):
    pass
