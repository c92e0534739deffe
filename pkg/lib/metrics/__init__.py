from .metric import Metric
from .scalar import Scalar

from .squared_error import SquaredError
