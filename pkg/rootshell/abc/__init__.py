from .cartan_type import *
from .error_code import *
from .group_form import *
