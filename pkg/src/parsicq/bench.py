"""Convergence studies on the scalar benchmark convolutions.

The right-hand side is ``g(t) = sin(t)**2`` for ``t > 0``, which is only once
differentiable at the origin. For ``K(s) = s / (1 - exp(-s))`` the exact
convolution is ``sum_j g'(t - j)``.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .engine import CQParams, ConvolutionResult, choose_parameters, parsimonious_cq_all, standard_cq
from .errors import ConfigurationError
from .generators import get_generator
from .kernels import LaplaceKernel, hyperbolic_kernel, sectorial_kernel, toy_matrix_kernel
from .mesh import AngularMesh, build_mesh_bdf2, build_mesh_euler, build_mesh_sectorial

# Observed CQ orders on the benchmark data, used to pick epsilon.
ASSUMED_ORDER = {"euler": 0.5, "bdf2": 2.0 / 3.0, "trapezoidal": 2.0 / 3.0}

CSV_HEADER = "N,L,laplace_evals,kernel_applications,error,observed_order,wall_time_ms"


def rhs_g(t):
    """``sin(t)**2`` for ``t > 0``, zero otherwise."""
    t = np.asarray(t, dtype=float)
    return np.where(t > 0, np.sin(t) ** 2, 0.0)


def rhs_g_prime(t):
    t = np.asarray(t, dtype=float)
    return np.where(t > 0, np.sin(2.0 * t), 0.0)


def exact_hyperbolic(t):
    """Exact ``K(d/dt) g`` for the hyperbolic kernel: ``sum_{j <= t} g'(t - j)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ConfigurationError("need t >= 0")
    out = np.zeros_like(t)
    jmax = int(np.floor(np.max(t))) if t.size else 0
    for j in range(jmax + 1):
        out = out + rhs_g_prime(t - j)
    return out


def weighted_l2_error(a, b, tau: float) -> float:
    """``sqrt(tau * sum_n |a_n - b_n|**2)``, Euclidean norm per time for vectors."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ConfigurationError(f"length mismatch: {a.shape} vs {b.shape}")
    return math.sqrt(tau * float(np.sum(np.abs(a - b) ** 2)))


@dataclass(frozen=True)
class ExperimentConfig:
    """One convergence study.

    ``kernel`` is ``hyperbolic``, ``sectorial:ALPHA`` or ``matrix:D``;
    ``reference`` is ``analytic`` or ``fine:NREF``.
    """

    kernel: str = "hyperbolic"
    method: str = "euler"
    scheme: str = "standard"
    T: float = 5.0
    N_list: tuple = (20, 40, 80, 160, 320, 640, 1280, 2560, 5120)
    rho: float = 2.0
    gamma_quad: float = 0.3
    sector_gamma: Optional[float] = None
    sector_c: float = 1.0
    reference: str = "analytic"
    use_symmetry: bool = True
    out: Optional[str] = None

    def __post_init__(self):
        ns = list(self.N_list)
        if not ns or any(n <= 0 for n in ns) or ns != sorted(set(ns)):
            raise ConfigurationError("N values must be positive and ascending")
        if self.scheme not in ("standard", "parsimonious"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        get_generator(self.method)
        if not 0 < self.T < math.inf:
            raise ConfigurationError("T must be positive and finite")
        n_ref = self.reference_N
        if n_ref is not None and n_ref <= max(ns):
            raise ConfigurationError("N_ref must exceed every N in the study")

    @property
    def reference_N(self) -> Optional[int]:
        if self.reference == "analytic":
            return None
        if self.reference.startswith("fine:"):
            try:
                return int(self.reference[5:])
            except ValueError:
                pass
        raise ConfigurationError(f"bad reference {self.reference!r}")


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    L: int
    laplace_evals: int
    kernel_applications: int
    error: float
    observed_order: Optional[float]
    wall_time_ms: float


def parse_kernel(spec: str) -> LaplaceKernel:
    name, _, arg = spec.partition(":")
    try:
        if name == "hyperbolic" and not arg:
            return hyperbolic_kernel()
        if name == "sectorial":
            return sectorial_kernel(float(arg) if arg else 2.0 / 3.0)
        if name == "matrix":
            return toy_matrix_kernel(hyperbolic_kernel(), int(arg) if arg else 2)
    except ValueError as exc:
        raise ConfigurationError(f"bad kernel spec {spec!r}: {exc}") from None
    raise ConfigurationError(f"unknown kernel {spec!r}")


def sample_input(kernel: LaplaceKernel, params: CQParams) -> np.ndarray:
    g = rhs_g(params.times)
    if kernel.is_matrix:
        return np.repeat(g[:, None], kernel.dim, axis=1)
    return g


def analytic_reference(kernel: LaplaceKernel, t) -> np.ndarray:
    if kernel.sector_gamma is not None:
        raise ConfigurationError("analytic reference only for hyperbolic kernel")
    u = exact_hyperbolic(t)
    if kernel.is_matrix:
        return u[:, None] * (1.0 + np.arange(kernel.dim) / 10.0)
    return u


def build_mesh_for(config: ExperimentConfig, kernel: LaplaceKernel, params: CQParams) -> AngularMesh:
    if config.method == "trapezoidal":
        raise ConfigurationError("no parsimonious mesh for the trapezoidal rule")
    if config.method == "euler" and kernel.sector_gamma:
        gamma = config.sector_gamma if config.sector_gamma is not None else kernel.sector_gamma
        return build_mesh_sectorial(params.lam, gamma, config.sector_c, rho=config.rho)
    if config.method == "euler":
        return build_mesh_euler(params.N, params.epsilon, params.lam, rho=config.rho)
    return build_mesh_bdf2(
        params.N, params.epsilon, params.lam, config.gamma_quad, rho=config.rho
    )


def params_for(config: ExperimentConfig, kernel: LaplaceKernel, N: int) -> CQParams:
    return choose_parameters(
        N,
        config.T,
        ASSUMED_ORDER[config.method],
        kernel.mu,
        use_symmetry=config.use_symmetry,
    )


def run_single(config: ExperimentConfig, N: int, kernel: Optional[LaplaceKernel] = None) -> ConvolutionResult:
    """Run the configured scheme for one ``N`` on the sampled right-hand side."""
    kernel = parse_kernel(config.kernel) if kernel is None else kernel
    gen = get_generator(config.method)
    params = params_for(config, kernel, N)
    g = sample_input(kernel, params)
    if config.scheme == "standard":
        return standard_cq(kernel, gen, params, g)
    mesh = build_mesh_for(config, kernel, params)
    return parsimonious_cq_all(kernel, gen, params, mesh, g)


@dataclass
class FineReference:
    """Standard CQ values on a fine grid, resampled to coarser grids by stride."""

    T: float
    N_ref: int
    values: np.ndarray

    def at(self, N: int) -> np.ndarray:
        if N <= 0 or self.N_ref % N:
            raise ConfigurationError(f"N_ref={self.N_ref} is not a multiple of N={N}")
        return self.values[:: self.N_ref // N]


def fine_reference(kernel: LaplaceKernel, method: str, T: float, N_ref: int) -> FineReference:
    gen = get_generator(method)
    params = choose_parameters(N_ref, T, ASSUMED_ORDER[method], kernel.mu)
    g = sample_input(kernel, params)
    return FineReference(T, N_ref, standard_cq(kernel, gen, params, g).values)


def run_study(config: ExperimentConfig) -> list[ConvergenceRow]:
    """Error and cost for every ``N`` of the study, sorted by ``N``."""
    kernel = parse_kernel(config.kernel)
    n_ref = config.reference_N
    if n_ref is None:
        analytic_reference(kernel, np.zeros(1))
        fine = None
    else:
        for N in config.N_list:
            if n_ref % N:
                raise ConfigurationError(f"N_ref={n_ref} is not a multiple of N={N}")
        fine = fine_reference(kernel, config.method, config.T, n_ref)

    rows: list[ConvergenceRow] = []
    prev = None
    for N in sorted(config.N_list):
        start = time.perf_counter()
        result = run_single(config, N, kernel)
        elapsed = 1e3 * (time.perf_counter() - start)
        params = result.params
        ref = analytic_reference(kernel, params.times) if fine is None else fine.at(N)
        err = weighted_l2_error(result.values, ref, params.tau)
        order = None
        if prev is not None and prev[1] > 0 and err > 0:
            order = math.log(prev[1] / err) / math.log(N / prev[0])
        rows.append(
            ConvergenceRow(
                N,
                params.L,
                result.stats.laplace_evals,
                result.stats.applications,
                err,
                order,
                elapsed,
            )
        )
        prev = (N, err)
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def rows_to_csv(rows: Sequence[ConvergenceRow]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        fields = (r.N, r.L, r.laplace_evals, r.kernel_applications, r.error, r.observed_order, r.wall_time_ms)
        buf.write(",".join(_fmt(f) for f in fields) + "\n")
    return buf.getvalue()


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])
