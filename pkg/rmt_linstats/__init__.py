from .version import __version__
from .errors import (
    ConfigError,
    DomainError,
    NumericalError,
    ResolutionError,
    RmtLinstatsError,
    UnsupportedEnsembleError,
)
from .util import DotDict, to_json
from .ensembles import EnsembleSpec, mgf, mgf_beta2, mgf_direct, mgf_squared, finite_moments
from .operator import TestFunction, ScaledStatistic
