import slimreg.nn
from slimreg.core import BNMode, SlimregError
from slimreg.nn import Depth, SlimmableNetwork, Width

__all__ = ['nn', 'BNMode', 'SlimregError', 'Depth', 'SlimmableNetwork', 'Width']
