"""Standard and parsimonious convolution quadrature.

Both schemes evaluate

    u_n = lam**(-n) / L * sum_l zeta_L**(l n) K(delta(lam zeta_L**(-l)) / tau) ghat_l,
    ghat_l = sum_j lam**j zeta_L**(-j l) g_j,

with two DFTs. The standard scheme evaluates ``K`` at every contour point.
The parsimonious scheme evaluates it at the trapezoidal points only on
intervals flagged exact, and elsewhere at ``p + 1`` Chebyshev angles per
interval, interpolating in the contour angle.

Summation is carried out in ascending interval index and, inside an
interval, in ascending contour index, so results do not depend on how the
kernel evaluations were scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .generators import Generator
from .kernels import KernelStats, LaplaceKernel, counted
from .mesh import AngularMesh, extend_symmetric
from .numerics import cheb_nodes, dft, dft_real

EPS_MACH = float(np.finfo(float).eps)
EPS_CAP = 1e-2


@dataclass(frozen=True)
class CQParams:
    """Discretisation parameters of one CQ run."""

    N: int
    T: float
    L: int
    k: float
    epsilon: float
    lam: float
    p: int
    sigma: float = 0.0
    use_symmetry: bool = True

    def __post_init__(self):
        if self.N < 1 or not 0 < self.T < math.inf:
            raise ConfigurationError("need N >= 1 and finite T > 0")
        if self.L < self.N:
            raise ConfigurationError("need L >= N")
        if not 0.0 < self.lam < 1.0:
            raise ConfigurationError("lambda must lie in (0, 1)")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigurationError("epsilon must lie in (0, 1)")
        if self.p < 1:
            raise ConfigurationError("need p >= 1")
        if self.sigma < 0:
            raise ConfigurationError("sigma must be nonnegative")

    @property
    def tau(self) -> float:
        return self.T / self.N

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(self.N + 1)


def choose_parameters(
    N: int,
    T: float,
    k: float,
    mu: float,
    eps_mach: float = EPS_MACH,
    L: Optional[int] = None,
    sigma: float = 0.0,
    use_symmetry: bool = True,
) -> CQParams:
    """Balance contour, trapezoidal and interpolation errors against the
    expected CQ order ``k``:

    ``eps = max(tau**(2(k + mu + 1)), eps_mach)``, ``p = ceil(-log2 eps)``,
    ``lam = eps**(1/(2N))``. ``eps`` is capped at ``1e-2`` so that coarse
    steps still give ``lam < 1`` and ``p >= 7``. ``L`` defaults to ``N + 1``,
    the smallest length that keeps all ``N + 1`` samples alias free.
    """
    if N < 1 or T <= 0 or k <= 0:
        raise ConfigurationError("need N >= 1, T > 0 and k > 0")
    tau = T / N
    log_eps = 2.0 * (k + mu + 1.0) * math.log(tau)
    eps = max(math.exp(log_eps) if log_eps > -745 else 0.0, eps_mach)
    eps = min(eps, EPS_CAP)
    p = math.ceil(-math.log2(eps) - 1e-12)
    lam = eps ** (1.0 / (2.0 * N))
    return CQParams(
        N=N,
        T=T,
        L=N + 1 if L is None else int(L),
        k=k,
        epsilon=eps,
        lam=lam,
        p=p,
        sigma=sigma,
        use_symmetry=use_symmetry,
    )


@dataclass
class ConvolutionResult:
    """Approximate convolution values plus instrumentation.

    ``values`` has shape ``(N+1,)`` / ``(N+1, d)`` for all-times runs, or
    ``()`` / ``(d,)`` for a single time ``index``.
    """

    values: np.ndarray
    stats: KernelStats
    params: CQParams
    index: Optional[int] = None
    imag_residue: float = 0.0
    extra: dict = field(default_factory=dict)


def contour_points(gen: Generator, params: CQParams, angles) -> np.ndarray:
    """Laplace arguments ``delta(lam exp(-i phi)) / tau`` (shift included)."""
    z = params.lam * np.exp(-1j * np.asarray(angles, dtype=float))
    return gen.delta(z) / params.tau + params.sigma


def trapezoid_angles(L: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(L) / L


def _reduced_trapezoid_angles(ls: np.ndarray, L: int) -> np.ndarray:
    """``y_l`` shifted into ``(-pi, pi]`` so that ``y_l`` and ``y_{L-l}`` are
    exact negatives and their contour points exact conjugates."""
    ls = np.asarray(ls, dtype=int)
    upper = 2 * ls > L
    return np.where(upper, -2.0 * math.pi * (L - ls) / L, 2.0 * math.pi * ls / L)


def _cheb_angles(mesh: AngularMesh, j: int, p: int) -> np.ndarray:
    """Chebyshev angles of interval ``j``; mirrored intervals reuse the negated
    angles of their partner in ``[0, pi]`` (node ``k`` pairs with ``p - k``)."""
    m = mesh.mirror(j)
    if j < m:
        grid = mesh.grids.get(j) or cheb_nodes(*mesh.interval(j), p)
        return grid.nodes
    return -_cheb_angles(mesh, m, p)[::-1]


def _symmetric(kernel: LaplaceKernel, params: CQParams) -> bool:
    return params.use_symmetry and kernel.real_symmetric


def _prepare_input(g, params: CQParams):
    g = np.asarray(g)
    vector = g.ndim == 2
    if g.ndim == 1:
        g = g[:, None]
    if g.ndim != 2 or g.shape[0] != params.N + 1:
        raise ConfigurationError(
            f"input must have N+1 = {params.N + 1} entries, got shape {np.shape(g)}"
        )
    return g, vector


def _forward(g: np.ndarray, params: CQParams) -> np.ndarray:
    """``ghat_l = sum_j lam**j zeta_L**(-j l) g_j`` (with shift weights)."""
    j = np.arange(params.N + 1)
    scale = params.lam**j
    if params.sigma > 0:
        scale = scale * np.exp(-params.sigma * params.tau * j)
    weighted = scale[:, None] * g
    folded = np.zeros((params.L, g.shape[1]), dtype=weighted.dtype)
    if params.L >= params.N + 1:
        folded[: params.N + 1] = weighted
    else:
        np.add.at(folded, j % params.L, weighted)
    if np.isrealobj(folded):
        # Exact conjugate symmetry keeps real outputs real up to roundoff.
        return dft_real(folded)
    return dft(folded, "forward")


def _backward(U: np.ndarray, params: CQParams) -> np.ndarray:
    y = dft(U, "inverse")
    n = np.arange(params.N + 1)
    u = params.lam ** (-n)[:, None] * y[n % params.L]
    if params.sigma > 0:
        u = u * np.exp(params.sigma * params.tau * n)[:, None]
    return u


def _finish(
    u: np.ndarray,
    g: np.ndarray,
    kernel: LaplaceKernel,
    vector: bool,
    stats: KernelStats,
    params: CQParams,
    index: Optional[int] = None,
) -> ConvolutionResult:
    residue = 0.0
    if np.isrealobj(g) and kernel.real_symmetric:
        residue = float(np.max(np.abs(u.imag))) if u.size else 0.0
        u = u.real
    if not vector:
        u = u[..., 0]
    return ConvolutionResult(u, stats.snapshot(), params, index, residue)


def _evaluate_trapezoid(kernel, gen, params, ls: np.ndarray, symmetric: bool):
    """Kernel values at the trapezoidal angles ``y_l`` for the given ``l``."""
    L = params.L
    ls = np.asarray(ls, dtype=int)
    if ls.size == 0:
        return np.zeros((0,) + ((kernel.dim, kernel.dim) if kernel.is_matrix else ()))
    if not symmetric:
        return kernel(contour_points(gen, params, _reduced_trapezoid_angles(ls, L)))
    partner = (L - ls) % L
    canon = np.minimum(ls, partner)
    uniq, inverse = np.unique(canon, return_inverse=True)
    vals = kernel(contour_points(gen, params, _reduced_trapezoid_angles(uniq, L)))[inverse]
    flip = ls != canon
    vals[flip] = np.conj(vals[flip])
    return vals


def _evaluate_chebyshev(kernel, gen, params, mesh: AngularMesh, js, symmetric: bool):
    """Kernel values at the Chebyshev angles of each interval in ``js``."""
    out = {}
    if not js:
        return out
    if not symmetric:
        nodes = np.concatenate([_cheb_angles(mesh, j, params.p) for j in js])
        vals = kernel(contour_points(gen, params, nodes))
        for i, j in enumerate(js):
            out[j] = vals[i * (params.p + 1) : (i + 1) * (params.p + 1)]
        return out
    canon = sorted({min(j, mesh.mirror(j)) for j in js})
    nodes = np.concatenate([_cheb_angles(mesh, j, params.p) for j in canon])
    vals = kernel(contour_points(gen, params, nodes))
    canon_vals = {
        j: vals[i * (params.p + 1) : (i + 1) * (params.p + 1)]
        for i, j in enumerate(canon)
    }
    for j in js:
        if j in canon_vals:
            out[j] = canon_vals[j]
        else:
            # Node k of the mirrored interval is 2 pi minus node p - k.
            out[j] = np.conj(canon_vals[mesh.mirror(j)][::-1])
    return out


def cq_weights(
    kernel: LaplaceKernel,
    gen: Generator,
    params: CQParams,
    n_max: Optional[int] = None,
) -> np.ndarray:
    """Trapezoidal approximations ``W_0 .. W_{n_max}`` of the CQ weights."""
    n_max = params.N if n_max is None else n_max
    if not 0 <= n_max <= params.N:
        raise ConfigurationError("need 0 <= n_max <= N")
    ls = np.arange(params.L)
    K = _evaluate_trapezoid(kernel, gen, params, ls, _symmetric(kernel, params))
    y = dft(K, "inverse")
    n = np.arange(n_max + 1)
    scale = params.lam ** (-n)
    return scale.reshape((-1,) + (1,) * (K.ndim - 1)) * y[n % params.L]


def standard_cq(
    kernel: LaplaceKernel, gen: Generator, params: CQParams, g
) -> ConvolutionResult:
    """FFT-based CQ with one kernel evaluation per contour point.

    For real-symmetric kernels and ``params.use_symmetry`` only
    ``l = 0 .. floor(L/2)`` are evaluated; the remaining values are
    conjugates. With ``params.sigma > 0`` the kernel is evaluated at shifted
    arguments ``s + sigma``, the input is weighted by ``exp(-sigma t)`` and
    the output by ``exp(sigma t)``, which leaves the approximated convolution
    unchanged.
    """
    G, vector = _prepare_input(g, params)
    kern, stats = counted(kernel)
    ghat = _forward(G, params)
    ls = np.arange(params.L)
    K = _evaluate_trapezoid(kern, gen, params, ls, _symmetric(kernel, params))
    U = kern.apply(K, ghat)
    u = _backward(U, params)
    return _finish(u, G, kernel, vector, stats, params)


def _prepare_mesh(mesh: AngularMesh, params: CQParams) -> AngularMesh:
    if not math.isclose(mesh.lam, params.lam, rel_tol=1e-12):
        raise ConfigurationError("mesh built for different contour")
    if mesh.L != params.L or mesh.p != params.p:
        mesh = extend_symmetric(mesh, params.L, params.p)
    return mesh


def _split(mesh: AngularMesh):
    exact_ls, interp = [], []
    for j in range(mesh.n_intervals):
        ls = mesh.index_map.nodes_in(j)
        if ls.size == 0:
            continue
        if mesh.exact_flags[j]:
            exact_ls.append(ls)
        else:
            interp.append(j)
    exact_ls = np.concatenate(exact_ls) if exact_ls else np.zeros(0, dtype=int)
    return exact_ls, interp


def parsimonious_cq_all(
    kernel: LaplaceKernel,
    gen: Generator,
    params: CQParams,
    mesh: AngularMesh,
    g,
) -> ConvolutionResult:
    """Parsimonious CQ at all times ``t_0 .. t_N``."""
    mesh = _prepare_mesh(mesh, params)
    G, vector = _prepare_input(g, params)
    kern, stats = counted(kernel)
    symmetric = _symmetric(kernel, params)
    ghat = _forward(G, params)
    y = trapezoid_angles(params.L)

    exact_ls, interp = _split(mesh)
    U = np.zeros_like(ghat)
    K_exact = _evaluate_trapezoid(kern, gen, params, exact_ls, symmetric)
    if exact_ls.size:
        U[exact_ls] = kern.apply(K_exact, ghat[exact_ls])
    K_cheb = _evaluate_chebyshev(kern, gen, params, mesh, interp, symmetric)
    for j in interp:
        ls = mesh.index_map.nodes_in(j)
        lag = mesh.grids[j].lagrange_matrix(y[ls])
        applied = kern.apply(K_cheb[j][None], ghat[ls][:, None, :])
        U[ls] = np.einsum("lk,lkd->ld", lag, applied)
    u = _backward(U, params)
    result = _finish(u, G, kernel, vector, stats, params)
    result.extra["mesh"] = mesh
    return result


def parsimonious_cq_single(
    kernel: LaplaceKernel,
    gen: Generator,
    params: CQParams,
    mesh: AngularMesh,
    g,
    n: int,
) -> ConvolutionResult:
    """Parsimonious CQ at the single time ``t_n``.

    Each Chebyshev evaluation is applied once, to the Lagrange- and
    phase-weighted sum of the transformed data over its interval.
    """
    if not 0 <= n <= params.N:
        raise ConfigurationError(f"time index {n} out of range 0..{params.N}")
    mesh = _prepare_mesh(mesh, params)
    G, vector = _prepare_input(g, params)
    kern, stats = counted(kernel)
    symmetric = _symmetric(kernel, params)
    ghat = _forward(G, params)
    L = params.L
    y = trapezoid_angles(L)
    phase = np.exp(2j * math.pi * ((np.arange(L) * n) % L) / L)

    exact_ls, interp = _split(mesh)
    K_exact = _evaluate_trapezoid(kern, gen, params, exact_ls, symmetric)
    K_exact_of = {int(l): i for i, l in enumerate(exact_ls)}
    K_cheb = _evaluate_chebyshev(kern, gen, params, mesh, interp, symmetric)

    total = np.zeros(G.shape[1], dtype=complex)
    for j in range(mesh.n_intervals):
        ls = mesh.index_map.nodes_in(j)
        if ls.size == 0:
            continue
        weighted = phase[ls, None] * ghat[ls]
        if mesh.exact_flags[j]:
            idx = [K_exact_of[int(l)] for l in ls]
            total += kern.apply(K_exact[idx], weighted).sum(axis=0)
        else:
            lag = mesh.grids[j].lagrange_matrix(y[ls])
            combined = lag.T @ weighted
            total += kern.apply(K_cheb[j], combined).sum(axis=0)
    value = params.lam ** (-n) / L * total
    if params.sigma > 0:
        value = value * math.exp(params.sigma * params.tau * n)
    result = _finish(value[None], G, kernel, vector, stats, params, index=n)
    result.values = result.values[0]
    return result


def contour_function(kernel: LaplaceKernel, gen: Generator, params: CQParams):
    """``phi -> K(delta(lam exp(-i phi)) / tau)``, the function being interpolated."""

    def f(phi):
        return kernel(contour_points(gen, params, phi))

    return f


def interpolation_error(
    kernel: LaplaceKernel,
    gen: Generator,
    params: CQParams,
    a: float,
    b: float,
    p: int,
    samples: int = 1000,
) -> float:
    """Sup-norm error of the degree-``p`` Chebyshev interpolant of the contour
    function on ``[a, b]``, measured on ``samples`` uniform points."""
    f = contour_function(kernel, gen, params)
    grid = cheb_nodes(a, b, p)
    x = np.linspace(a, b, samples)
    approx = np.tensordot(grid.lagrange_matrix(x), f(grid.nodes), axes=(1, 0))
    diff = approx - f(x)
    if kernel.is_matrix:
        return float(np.max(np.linalg.norm(diff, ord=2, axis=(-2, -1))))
    return float(np.max(np.abs(diff)))


def perturbation_bound(kernel: LaplaceKernel, params: CQParams) -> float:
    """``M0 tau**(-mu) (N lam**L / (1 - lam**L) + lam**(-N) 2**(-p))``."""
    lamL = params.lam**params.L
    return (
        kernel.M0
        * params.tau ** (-kernel.mu)
        * (params.N * lamL / (1.0 - lamL) + params.lam ** (-params.N) * 2.0 ** (-params.p))
    )
