from .report import *
from .semidense import *
from .exponent import *
from .harmonic import *
from .geometry import *
