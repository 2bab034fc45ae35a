"""High derivatives of Xi-functions of Selberg-class L-functions.

The pipeline runs from functional-equation data (:mod:`selberg_core`) through
Fourier transforms of Gamma products (:mod:`gamma_ft`) and the Fourier kernel of
the Xi-function (:mod:`kernel`) to the scaled 2n-th derivatives and their
convergence to a cosine (:mod:`deriv_engine`).
"""
from .deriv_engine import (ConvergenceReport, ScalingSequence, convergence_report, ki_integral,
                           log_An_asymptotic, normalized_derivative, scaling_sequence, solve_wn,
                           xi_canonical, zero_spacings)
from .gamma_ft import (GammaProductSpec, complex_gamma, ft_product_asymptotic,
                       ft_product_poly_asymptotic, ft_quadrature_oracle, ft_single_gamma,
                       prefactor_Ck, prefactor_Ckm)
from .kernel import KernelSpec, asym_kernel, canonical_kernel, xihat_series, zeta_theta_kernel
from .lognum import LogComplex, SignedLogReal
from .selberg_core import (DerivedConstants, GammaFactor, SelbergData, builtin, derive_constants,
                           duplicate_gamma_factor, validate)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceReport", "ScalingSequence", "convergence_report", "ki_integral", "log_An_asymptotic",
    "normalized_derivative", "scaling_sequence", "solve_wn", "xi_canonical", "zero_spacings",
    "GammaProductSpec", "complex_gamma", "ft_product_asymptotic", "ft_product_poly_asymptotic",
    "ft_quadrature_oracle", "ft_single_gamma", "prefactor_Ck", "prefactor_Ckm",
    "KernelSpec", "asym_kernel", "canonical_kernel", "xihat_series", "zeta_theta_kernel",
    "LogComplex", "SignedLogReal",
    "DerivedConstants", "GammaFactor", "SelbergData", "builtin", "derive_constants",
    "duplicate_gamma_factor", "validate",
]
