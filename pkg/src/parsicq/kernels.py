"""Laplace-domain kernels ``s -> K(s)`` with growth metadata.

A kernel is evaluated on arrays of complex frequencies. Scalar kernels return
an array of the same shape; matrix-valued kernels append two trailing axes of
size ``dim``. Kernels act on vectors through :meth:`LaplaceKernel.apply`, which
is also where kernel-vector applications are counted.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, KernelPoleError, NumericalError

POLE_DISTANCE = 1e-8
SERIES_THRESHOLD = 1e-3
BENCHMARK_M0 = 2.0


class LaplaceKernel:
    """An analytic family ``K(s)`` with growth bound ``||K(s)|| <= M0 |s|**mu``.

    Parameters
    ----------
    func : callable
        Vectorised map from a complex array to kernel values.
    mu, M0 : float
        Growth exponent and constant of the polynomial bound.
    real_symmetric : bool
        Asserts ``K(conj(s)) == conj(K(s))``.
    sector_gamma : float or None
        Present iff the kernel extends to the sector ``Re s > -gamma |Im s|``.
    dim : int or None
        ``None`` for scalar kernels, otherwise the matrix dimension.
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        mu: float,
        M0: float = BENCHMARK_M0,
        real_symmetric: bool = False,
        sector_gamma: Optional[float] = None,
        dim: Optional[int] = None,
        name: str = "kernel",
    ):
        if M0 <= 0:
            raise ConfigurationError("M0 must be positive")
        if sector_gamma is not None and sector_gamma < 0:
            raise ConfigurationError("sector_gamma must be nonnegative")
        self.func = func
        self.mu = float(mu)
        self.M0 = float(M0)
        self.real_symmetric = bool(real_symmetric)
        self.sector_gamma = sector_gamma
        self.dim = dim
        self.name = name

    @property
    def is_matrix(self) -> bool:
        return self.dim is not None

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        values = np.asarray(self.func(s))
        if not np.all(np.isfinite(values)):
            raise NumericalError(f"{self.name}: non-finite kernel value")
        return values

    def apply(self, values, vectors) -> np.ndarray:
        """Apply kernel values to vectors.

        ``values`` has batch shape ``B`` (plus ``(d, d)`` for matrix kernels),
        ``vectors`` has shape ``B + (d,)``.
        """
        vectors = np.asarray(vectors)
        if self.is_matrix:
            # Same elementwise products as the scalar branch, so diagonal
            # kernels reproduce scalar runs bit for bit.
            return (np.asarray(values) * vectors[..., None, :]).sum(axis=-1)
        return np.asarray(values)[..., None] * vectors

    def __repr__(self):
        return f"<LaplaceKernel {self.name} mu={self.mu} dim={self.dim}>"


@dataclass
class KernelStats:
    """Counters of Laplace evaluations and kernel-vector applications."""

    laplace_evals: int = 0
    applications: int = 0
    _lock: threading.Lock = field(
        default_factory=threading.Lock, repr=False, compare=False
    )

    def add(self, evals: int = 0, applications: int = 0) -> None:
        with self._lock:
            self.laplace_evals += int(evals)
            self.applications += int(applications)

    def reset(self) -> None:
        with self._lock:
            self.laplace_evals = 0
            self.applications = 0

    def snapshot(self) -> "KernelStats":
        with self._lock:
            return KernelStats(self.laplace_evals, self.applications)


class CountedKernel(LaplaceKernel):
    """Wrapper counting every evaluated frequency and every application."""

    def __init__(self, base: LaplaceKernel, stats: KernelStats):
        super().__init__(
            base.func,
            base.mu,
            base.M0,
            base.real_symmetric,
            base.sector_gamma,
            base.dim,
            base.name,
        )
        self.base = base
        self.stats = stats

    def __call__(self, s):
        values = self.base(s)
        n = int(np.size(s))
        # A scalar evaluation is its own application.
        self.stats.add(evals=n, applications=0 if self.is_matrix else n)
        return values

    def apply(self, values, vectors):
        out = self.base.apply(values, vectors)
        if self.is_matrix:
            self.stats.add(applications=int(np.prod(out.shape[:-1])))
        return out


def counted(base: LaplaceKernel) -> tuple[CountedKernel, KernelStats]:
    """Wrap ``base`` so that evaluations and applications are counted."""
    stats = KernelStats()
    return CountedKernel(base, stats), stats


def _one_minus_exp_neg(w: np.ndarray) -> np.ndarray:
    """``1 - exp(-w)`` without cancellation for small ``|Re w|``, ``|Im w|``."""
    x, y = -w.real, -w.imag
    em1 = np.expm1(x)
    real = em1 * np.cos(y) - 2.0 * np.sin(y / 2.0) ** 2
    imag = np.exp(x) * np.sin(y)
    return -(real + 1j * imag)


# Coefficients of (1 - exp(-w)) / w = 1 - w/2 + w^2/6 - w^3/24 + ...
_SERIES = np.array([(-1.0) ** n / math.factorial(n + 1) for n in range(10)])


def _quotient_series(w: np.ndarray) -> np.ndarray:
    """``(1 - exp(-w)) / w`` by its Taylor series (Horner form)."""
    acc = np.zeros_like(w)
    for c in _SERIES[::-1]:
        acc = acc * w + c
    return acc


def _check_poles(w: np.ndarray, name: str) -> None:
    k = np.round(w.imag / (2 * np.pi))
    dist = np.abs(w - 2j * np.pi * k)
    bad = (k != 0) & (dist < POLE_DISTANCE)
    if np.any(bad):
        raise KernelPoleError(f"{name}: pole of kernel near s={w[bad].flat[0]}")


def _hyperbolic(s: np.ndarray) -> np.ndarray:
    _check_poles(s, "hyperbolic")
    out = np.empty_like(s)
    denom = _one_minus_exp_neg(s)
    near_zero = (np.abs(denom) < SERIES_THRESHOLD) & (np.abs(s) < 1.0)
    direct = ~near_zero
    out[direct] = s[direct] / denom[direct]
    out[near_zero] = 1.0 / _quotient_series(s[near_zero])
    return out


def hyperbolic_kernel() -> LaplaceKernel:
    """``K(s) = s / (1 - exp(-s))``; analytic only on the right half plane."""
    return LaplaceKernel(
        _hyperbolic, mu=1.0, M0=BENCHMARK_M0, real_symmetric=True, name="hyperbolic"
    )


def sectorial_kernel(alpha: float) -> LaplaceKernel:
    """``K(s) = s / (1 - exp(-s**alpha))`` with the principal branch of ``s**alpha``.

    Poles sit on the rays ``arg s = +-pi/(2 alpha)``, so for ``alpha < 1`` the
    kernel extends to the sector ``Re s > -gamma |Im s|`` with
    ``gamma = tan(pi (1 - alpha) / (2 alpha))`` (``gamma = 1`` for ``alpha = 2/3``).
    For ``alpha <= 1/2`` no pole lies off the branch cut and ``gamma`` is infinite.
    """
    if not 0.0 < alpha <= 1.0:
        raise ConfigurationError("alpha must lie in (0, 1]")
    if alpha == 1.0:
        kernel = hyperbolic_kernel()
        kernel.name = "sectorial(1)"
        return kernel
    if alpha <= 0.5:
        gamma = math.inf
    else:
        gamma = math.tan(math.pi * (1.0 - alpha) / (2.0 * alpha))
        if abs(gamma - round(gamma)) < 1e-12:
            gamma = float(round(gamma))

    def func(s: np.ndarray) -> np.ndarray:
        if np.any((s.imag == 0.0) & (s.real < 0.0)):
            raise KernelPoleError(f"sectorial({alpha}): branch cut of s**alpha")
        out = np.zeros_like(s)
        nz = s != 0
        sz = s[nz]
        w = np.power(sz, alpha)
        _check_poles(w, f"sectorial({alpha})")
        denom = _one_minus_exp_neg(w)
        near_zero = (np.abs(denom) < SERIES_THRESHOLD) & (np.abs(w) < 1.0)
        vals = np.empty_like(sz)
        vals[~near_zero] = sz[~near_zero] / denom[~near_zero]
        # s / (w q(w)) = s**(1-alpha) / q(w)
        vals[near_zero] = np.power(sz[near_zero], 1.0 - alpha) / _quotient_series(
            w[near_zero]
        )
        out[nz] = vals
        return out

    return LaplaceKernel(
        func,
        mu=1.0,
        M0=BENCHMARK_M0,
        real_symmetric=True,
        sector_gamma=gamma,
        name=f"sectorial({alpha:g})",
    )


def toy_matrix_kernel(base: LaplaceKernel, d: int) -> LaplaceKernel:
    """Diagonal ``d x d`` kernel with entries ``base(s) * (1 + i/10)``."""
    if d < 1:
        raise ConfigurationError("dimension must be at least 1")
    if base.is_matrix:
        raise ConfigurationError("base kernel must be scalar")
    scale = 1.0 + np.arange(d) / 10.0

    def func(s: np.ndarray) -> np.ndarray:
        vals = np.asarray(base(s))
        out = np.zeros(vals.shape + (d, d), dtype=complex)
        idx = np.arange(d)
        out[..., idx, idx] = vals[..., None] * scale
        return out

    return LaplaceKernel(
        func,
        mu=base.mu,
        M0=base.M0 * float(scale[-1]),
        real_symmetric=base.real_symmetric,
        sector_gamma=base.sector_gamma,
        dim=d,
        name=f"matrix({base.name},{d})",
    )


def shifted_kernel(base: LaplaceKernel, sigma: float) -> LaplaceKernel:
    """``s -> base(s + sigma)``; see :func:`parsicq.engine.standard_cq` for
    the compensating exponential weights."""
    if sigma < 0:
        raise ConfigurationError("sigma must be nonnegative")
    kernel = LaplaceKernel(
        lambda s: base(s + sigma),
        mu=base.mu,
        M0=base.M0,
        real_symmetric=base.real_symmetric,
        sector_gamma=base.sector_gamma,
        dim=base.dim,
        name=f"shifted({base.name},{sigma:g})",
    )
    kernel.apply = base.apply  # type: ignore[method-assign]
    return kernel


def growth_ratio(kernel: LaplaceKernel, s) -> float:
    """Largest ``||K(s)|| / (M0 |s|**mu)`` over the samples ``s``.

    Values up to about 1.01 are consistent with the declared growth bound.
    """
    s = np.asarray(s, dtype=complex).ravel()
    vals = kernel(s)
    if kernel.is_matrix:
        norms = np.linalg.norm(vals, ord=2, axis=(-2, -1))
    else:
        norms = np.abs(vals)
    return float(np.max(norms / (kernel.M0 * np.abs(s) ** kernel.mu)))
