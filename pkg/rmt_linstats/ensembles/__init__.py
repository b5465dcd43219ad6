from .spec import EnsembleSpec, ScalingRule
from .psi import build_M, build_psi, canonical_M, k22_kernel, mu_sum_kernel
from .determinant import finite_moments, mgf, mgf_beta2, mgf_squared, trace_log_mgf
from .direct import mgf_direct, mgf_direct_with_error
from .identities import debruijn_check, vandermonde4_det_check
