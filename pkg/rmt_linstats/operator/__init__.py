from .grid import QuadratureGrid, make_grid
from .kernel import (
    GridFunction,
    KernelMatrix,
    Symbol,
    TBuilder,
    apply_deriv,
    apply_eps,
    cumulants_from_T,
    fredholm_det,
    rank_one,
)
from .statistic import TestFunction, ScaledStatistic
