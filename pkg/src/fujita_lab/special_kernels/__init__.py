"""Bessel functions, Bessel-process heat kernels and Duhamel integrals."""

from .bessel import bessel_i, log_bessel_i_scaled
from .duhamel import (
    DuhamelParams,
    LowerBoundFit,
    QuadratureError,
    critical_u_integral,
    duhamel_lower_integral,
    fit_lower_bound,
    fractional_split,
    log_duhamel_lower_integral,
)
from .heat import (
    KernelParams,
    dirichlet_lower_bound,
    gaussian_kernel,
    kernel_q3_closed_form,
    kernel_qn,
    log_factor_2d,
    log_kernel_qn,
)

__all__ = [
    "DuhamelParams",
    "KernelParams",
    "LowerBoundFit",
    "QuadratureError",
    "bessel_i",
    "critical_u_integral",
    "dirichlet_lower_bound",
    "duhamel_lower_integral",
    "fit_lower_bound",
    "fractional_split",
    "gaussian_kernel",
    "kernel_q3_closed_form",
    "kernel_qn",
    "log_bessel_i_scaled",
    "log_duhamel_lower_integral",
    "log_factor_2d",
    "log_kernel_qn",
]
