"""Convolution quadrature with piecewise Chebyshev interpolation of the
Laplace-domain kernel (parsimonious CQ)."""

from .engine import (
    CQParams,
    ConvolutionResult,
    choose_parameters,
    cq_weights,
    parsimonious_cq_all,
    parsimonious_cq_single,
    standard_cq,
)
from .errors import CQError, ConfigurationError, KernelPoleError, NumericalError
from .generators import BDF2, IMPLICIT_EULER, TRAPEZOIDAL, Generator, get_generator
from .kernels import (
    KernelStats,
    LaplaceKernel,
    counted,
    hyperbolic_kernel,
    sectorial_kernel,
    shifted_kernel,
    toy_matrix_kernel,
)
from .mesh import (
    AngularMesh,
    build_mesh_bdf2,
    build_mesh_euler,
    build_mesh_generic,
    build_mesh_sectorial,
    extend_symmetric,
    verify_containment,
)

__version__ = "0.1.0"

__all__ = [
    "AngularMesh",
    "BDF2",
    "CQError",
    "CQParams",
    "ConfigurationError",
    "ConvolutionResult",
    "Generator",
    "IMPLICIT_EULER",
    "KernelPoleError",
    "KernelStats",
    "LaplaceKernel",
    "NumericalError",
    "TRAPEZOIDAL",
    "build_mesh_bdf2",
    "build_mesh_euler",
    "build_mesh_generic",
    "build_mesh_sectorial",
    "choose_parameters",
    "counted",
    "cq_weights",
    "extend_symmetric",
    "get_generator",
    "hyperbolic_kernel",
    "parsimonious_cq_all",
    "parsimonious_cq_single",
    "sectorial_kernel",
    "shifted_kernel",
    "standard_cq",
    "toy_matrix_kernel",
    "verify_containment",
]
