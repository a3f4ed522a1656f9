"""Numerical building blocks: DFTs, Chebyshev interpolation, Bernstein ellipses.

All routines work in double precision. Sequences of vectors are stored as
arrays of shape ``(L, d)``; transforms act along the first axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericalError


def dft(x, direction: str = "forward") -> np.ndarray:
    """Discrete Fourier transform along the first axis.

    ``forward`` computes ``X_k = sum_l x_l exp(-2 pi i k l / L)``, ``inverse``
    computes ``x_l = (1/L) sum_k X_k exp(+2 pi i k l / L)``. Any length is
    supported in O(L log L).
    """
    x = np.asarray(x, dtype=complex)
    if x.ndim == 0 or x.shape[0] == 0:
        raise ConfigurationError("empty sequence")
    if not np.all(np.isfinite(x)):
        raise NumericalError("non-finite entries in sequence")
    if direction == "forward":
        return np.fft.fft(x, axis=0)
    if direction == "inverse":
        return np.fft.ifft(x, axis=0)
    raise ConfigurationError(f"unknown direction {direction!r}")


def dft_real(x) -> np.ndarray:
    """Forward DFT of real data along the first axis, returned as the full
    spectrum with exact conjugate symmetry ``X_{L-k} = conj(X_k)``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[0] == 0:
        raise ConfigurationError("empty sequence")
    if not np.all(np.isfinite(x)):
        raise NumericalError("non-finite entries in sequence")
    L = x.shape[0]
    half = np.fft.rfft(x, axis=0)
    full = np.empty(x.shape, dtype=complex)
    full[: half.shape[0]] = half
    rest = L - half.shape[0]
    full[half.shape[0] :] = np.conj(half[1 : 1 + rest][::-1])
    return full


@dataclass(frozen=True)
class ChebGrid:
    """Chebyshev points of the first kind mapped to ``[a, b]``.

    Nodes are ordered as ``cos((2j+1) pi / (2p+2))`` is, i.e. decreasing.
    """

    a: float
    b: float
    degree: int
    nodes: np.ndarray
    barycentric_weights: np.ndarray

    def lagrange_matrix(self, x) -> np.ndarray:
        """Values ``l_k(x_i)`` of the Lagrange basis, shape ``(len(x), p+1)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        diff = x[:, None] - self.nodes[None, :]
        hit = diff == 0.0
        diff[hit] = 1.0
        c = self.barycentric_weights[None, :] / diff
        c /= c.sum(axis=1, keepdims=True)
        rows = hit.any(axis=1)
        c[rows] = hit[rows].astype(float)
        return c


def cheb_nodes(a: float, b: float, p: int) -> ChebGrid:
    """Chebyshev grid of degree ``p`` on ``[a, b]``."""
    if not a < b:
        raise ConfigurationError("degenerate interval")
    if p < 0:
        raise ConfigurationError("degree must be nonnegative")
    theta = (2 * np.arange(p + 1) + 1) * np.pi / (2 * p + 2)
    ref = np.cos(theta)
    nodes = a + (b - a) * (ref + 1.0) / 2.0
    # Weights for first-kind points, common scale factors dropped.
    weights = (-1.0) ** np.arange(p + 1) * np.sin(theta)
    return ChebGrid(float(a), float(b), int(p), nodes, weights)


def cheb_interpolate(grid: ChebGrid, samples, x):
    """Evaluate the degree-``p`` interpolant through ``samples`` at ``x``.

    ``samples`` has shape ``(p+1,)`` or ``(p+1, ...)`` (vector or matrix
    samples); ``x`` may be a scalar or an array.
    """
    samples = np.asarray(samples)
    if samples.shape[0] != grid.degree + 1:
        raise ConfigurationError(
            f"expected {grid.degree + 1} samples, got {samples.shape[0]}"
        )
    scalar_x = np.ndim(x) == 0
    lag = grid.lagrange_matrix(x)
    out = np.tensordot(lag, samples, axes=(1, 0))
    return out[0] if scalar_x else out


def bernstein_point(a: float, b: float, rho: float, theta):
    """Point(s) on the Bernstein ellipse ``E_rho`` with foci ``a`` and ``b``."""
    if rho <= 1.0:
        raise ConfigurationError("not an ellipse")
    if not a < b:
        raise ConfigurationError("degenerate interval")
    theta = np.asarray(theta, dtype=float)
    joukowski = (rho * np.exp(1j * theta) + np.exp(-1j * theta) / rho) / 2.0
    return a + (b - a) / 2.0 * (joukowski + 1.0)
