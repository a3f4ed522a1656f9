"""Angular meshes on which the contour kernel is interpolated piecewise.

A half mesh ``0 = Phi_{-1} < Phi_0 < ... < Phi_M = pi`` is built by one of the
recursions below and then mirrored to ``[0, 2 pi]`` by :func:`extend_symmetric`,
which also assigns the trapezoidal angles ``y_l = 2 pi l / L`` to intervals and
decides which intervals are evaluated exactly and which are interpolated.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError
from .generators import Generator
from .numerics import ChebGrid, bernstein_point, cheb_nodes

DEFAULT_RHO = 2.0
DEFAULT_GAMMA_QUAD = 0.3
MAX_STEPS = 1_000_000


@dataclass(frozen=True)
class NodeIndexMap:
    """Partition of ``l = 0..L-1`` into contiguous runs, one per interval.

    Interval ``j`` owns ``l`` in ``range(breakpoints[j], breakpoints[j+1])``.
    """

    L: int
    breakpoints: np.ndarray

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def nodes_in(self, j: int) -> np.ndarray:
        return np.arange(self.breakpoints[j], self.breakpoints[j + 1])


@dataclass(frozen=True)
class AngularMesh:
    """Angular mesh on ``[0, pi]`` and, once extended, on ``[0, 2 pi]``.

    ``nodes`` holds ``Phi_{-1} = 0, Phi_0, ..., Phi_M = pi``. For meshes
    started at ``Phi_0 = 0`` (sectorial) the collapsed interval is dropped and
    ``exact_ends`` is false. The extension fields are ``None`` until
    :func:`extend_symmetric` fills them.
    """

    nodes: np.ndarray
    lam: float
    rho: float = DEFAULT_RHO
    method: str = ""
    exact_ends: bool = True
    L: Optional[int] = None
    p: Optional[int] = None
    boundaries: Optional[np.ndarray] = None
    exact_flags: Optional[np.ndarray] = None
    grids: Optional[dict] = None
    index_map: Optional[NodeIndexMap] = None

    @property
    def M(self) -> int:
        """Index of the last node, ``Phi_M = pi``."""
        return self.n_half - 1 if self.exact_ends else self.n_half

    @property
    def n_half(self) -> int:
        """Number of intervals in ``[0, pi]``."""
        return len(self.nodes) - 1

    @property
    def n_intervals(self) -> int:
        return 2 * self.n_half

    @property
    def is_extended(self) -> bool:
        return self.boundaries is not None

    def mirror(self, j: int) -> int:
        """Index of the interval mirrored about ``pi``."""
        return self.n_intervals - 1 - j

    def interval(self, j: int) -> tuple[float, float]:
        b = self.boundaries if self.is_extended else self.nodes
        return float(b[j]), float(b[j + 1])


def _validate_contour(epsilon: float, lam: float) -> None:
    if not (0.0 < epsilon < 1.0 and 0.0 < lam < 1.0):
        raise ConfigurationError("invalid parameters")


def start_angle(N: int, epsilon: float) -> float:
    """``Phi_0 = sqrt(10 |log eps| / (6 N))``."""
    return math.sqrt(10.0 * abs(math.log(epsilon)) / (6.0 * N))


def euler_step(phi: float, lam: float) -> float:
    if phi >= 1.0:
        return math.pi
    growth = -8.0 / 3.0 * math.log(lam) - 8.0 / 3.0 * math.log(math.cos(7.0 / 8.0 * phi))
    return phi + min(phi, growth)


def bdf2_step(phi: float, lam: float, gamma_quad: float) -> float:
    if phi >= 1.0:
        return math.pi
    return min(math.pi, phi + abs(math.log(lam)) + gamma_quad * phi * phi)


def sectorial_step(phi: float, lam: float, sector_gamma: float, c: float) -> float:
    nxt = (1.0 + sector_gamma / c) * phi + abs(math.log(lam)) / c + phi * phi / c
    return min(math.pi, nxt)


def generic_step(phi: float, lam: float, xi: float, kappa: int, c: float) -> float:
    return min(math.pi, phi + (abs(math.log(lam)) + xi * phi**kappa) / c)


def _iterate(phi0: float, step) -> list[float]:
    nodes = [phi0]
    while nodes[-1] < math.pi:
        if len(nodes) > MAX_STEPS:
            raise ConfigurationError("mesh recursion does not terminate")
        nxt = step(nodes[-1])
        if not nxt > nodes[-1]:
            raise ConfigurationError("mesh recursion stalled")
        nodes.append(nxt)
    nodes[-1] = math.pi
    return nodes


def _start_nodes(N: int, epsilon: float, lam: float) -> float:
    _validate_contour(epsilon, lam)
    if N < 1:
        raise ConfigurationError("invalid parameters")
    phi0 = start_angle(N, epsilon)
    if phi0 >= math.pi:
        raise ConfigurationError("mesh degenerate (N too small)")
    return phi0


def build_mesh_euler(
    N: int, epsilon: float, lam: float, rho: float = DEFAULT_RHO
) -> AngularMesh:
    """Mesh for implicit Euler; at most ``3 + 3 sqrt(N)`` intervals.

    The interval bound and the half-plane containment of the ``rho = 2``
    Bernstein ellipses are guaranteed for ``-log(lam) <= 0.08``; outside that
    range a warning is issued and the mesh is built anyway.
    """
    phi0 = _start_nodes(N, epsilon, lam)
    if -math.log(lam) > 0.08:
        warnings.warn(
            f"-log(lambda) = {-math.log(lam):.3g} exceeds 0.08; "
            "interval guarantees do not apply",
            stacklevel=2,
        )
    nodes = _iterate(phi0, lambda phi: euler_step(phi, lam))
    return AngularMesh(np.array([0.0] + nodes), lam, rho, "euler")


def build_mesh_bdf2(
    N: int,
    epsilon: float,
    lam: float,
    gamma_quad: float = DEFAULT_GAMMA_QUAD,
    rho: float = DEFAULT_RHO,
) -> AngularMesh:
    """Mesh for BDF2: ``Phi_{j+1} = Phi_j + |log lam| + gamma_quad Phi_j**2``."""
    if gamma_quad <= 0:
        raise ConfigurationError("gamma_quad must be positive")
    phi0 = _start_nodes(N, epsilon, lam)
    nodes = _iterate(phi0, lambda phi: bdf2_step(phi, lam, gamma_quad))
    return AngularMesh(np.array([0.0] + nodes), lam, rho, "bdf2")


def build_mesh_sectorial(
    lam: float, sector_gamma: float, c: float = 1.0, rho: float = DEFAULT_RHO
) -> AngularMesh:
    """Geometrically graded mesh for sectorial kernels, started at ``Phi_0 = 0``."""
    if not 0.0 < lam < 1.0:
        raise ConfigurationError("invalid parameters")
    if not (0 < sector_gamma < math.inf and c > 0):
        raise ConfigurationError("sector_gamma must be finite and positive, c positive")
    nodes = _iterate(0.0, lambda phi: sectorial_step(phi, lam, sector_gamma, c))
    return AngularMesh(np.array(nodes), lam, rho, "sectorial", exact_ends=False)


def build_mesh_generic(
    lam: float,
    xi: float,
    kappa: int,
    c: float,
    phi0: float,
    rho: float = DEFAULT_RHO,
) -> AngularMesh:
    """``Phi_{j+1} = Phi_j + (|log lam| + xi Phi_j**kappa) / c`` from ``phi0``."""
    if not 0.0 < lam < 1.0:
        raise ConfigurationError("invalid parameters")
    if xi <= 0 or c <= 0:
        raise ConfigurationError("xi and c must be positive")
    if int(kappa) != kappa or kappa < 2:
        raise ConfigurationError("kappa must be an integer >= 2")
    if not 0.0 <= phi0 < math.pi:
        raise ConfigurationError("phi0 must lie in [0, pi)")
    nodes = _iterate(phi0, lambda phi: generic_step(phi, lam, xi, int(kappa), c))
    if phi0 > 0.0:
        return AngularMesh(np.array([0.0] + nodes), lam, rho, "generic")
    return AngularMesh(np.array(nodes), lam, rho, "generic", exact_ends=False)


def extend_symmetric(
    mesh: AngularMesh | Sequence[float],
    L: int,
    p: int,
    lam: Optional[float] = None,
) -> AngularMesh:
    """Mirror a half mesh to ``[0, 2 pi]`` and classify its intervals.

    Trapezoidal angles on a shared endpoint go to the lower-indexed interval.
    An interval is evaluated exactly if it is one of the two end intervals of
    a half-space mesh, or if it holds at most ``p + 1`` trapezoidal angles.
    """
    if not isinstance(mesh, AngularMesh):
        nodes = np.asarray(mesh, dtype=float)
        mesh = AngularMesh(nodes, lam if lam is not None else float("nan"))
    if L < 1 or p < 0:
        raise ConfigurationError("need L >= 1 and p >= 0")
    half = mesh.nodes
    if half[0] != 0.0 or half[-1] != math.pi or np.any(np.diff(half) <= 0):
        raise ConfigurationError("half mesh must increase strictly from 0 to pi")
    boundaries = np.concatenate([half, 2.0 * math.pi - half[-2::-1]])
    n_int = len(boundaries) - 1

    y = 2.0 * math.pi * np.arange(L) / L
    owner = np.clip(np.searchsorted(boundaries, y, side="left") - 1, 0, n_int - 1)
    breakpoints = np.searchsorted(owner, np.arange(n_int + 1), side="left")
    index_map = NodeIndexMap(L, breakpoints)
    counts = index_map.counts

    exact = counts <= p + 1
    if mesh.exact_ends:
        exact[0] = exact[-1] = True
    grids: dict[int, ChebGrid] = {
        j: cheb_nodes(boundaries[j], boundaries[j + 1], p)
        for j in range(n_int)
        if not exact[j]
    }
    return replace(
        mesh,
        L=int(L),
        p=int(p),
        boundaries=boundaries,
        exact_flags=exact,
        grids=grids,
        index_map=index_map,
    )


def verify_containment(
    mesh: AngularMesh,
    lam: Optional[float] = None,
    gen: Optional[Generator] = None,
    rho: float = DEFAULT_RHO,
    theta_samples: int = 256,
    sector_gamma: Optional[float] = None,
    intervals: Optional[Sequence[int]] = None,
) -> float:
    """Smallest sampled value of ``Re delta(lam exp(i phi))`` over the
    Bernstein ellipses of the interpolated intervals.

    In sectorial mode the quantity is ``Re delta + gamma |Im delta|``, which is
    positive exactly inside the sector ``Re s > -gamma |Im s|``. A positive
    result certifies (on the samples) that every ellipse lies in the domain of
    analyticity. Intervals default to all non-exact intervals in ``[0, pi]``.
    """
    from .generators import IMPLICIT_EULER

    if theta_samples < 8:
        raise ConfigurationError("theta_samples must be at least 8")
    lam = mesh.lam if lam is None else lam
    gen = IMPLICIT_EULER if gen is None else gen
    if intervals is None:
        if mesh.is_extended:
            intervals = [j for j in range(mesh.n_half) if not mesh.exact_flags[j]]
        else:
            first = 1 if mesh.exact_ends else 0
            intervals = range(first, mesh.n_half)
    theta = 2.0 * math.pi * np.arange(theta_samples) / theta_samples
    margin = math.inf
    for j in intervals:
        a, b = float(mesh.nodes[j]), float(mesh.nodes[j + 1])
        phi = bernstein_point(a, b, rho, theta)
        d = gen.delta(lam * np.exp(1j * phi))
        values = d.real if sector_gamma is None else d.real + sector_gamma * np.abs(d.imag)
        margin = min(margin, float(np.min(values)))
    return margin


def mesh_csv(mesh: AngularMesh) -> str:
    """CSV dump ``j,phi_lo,phi_hi,exact,num_trap_nodes`` of an extended mesh."""
    if not mesh.is_extended:
        raise ConfigurationError("mesh must be extended first")
    buf = io.StringIO()
    buf.write("j,phi_lo,phi_hi,exact,num_trap_nodes\n")
    counts = mesh.index_map.counts
    for j in range(mesh.n_intervals):
        lo, hi = mesh.interval(j)
        buf.write(
            f"{j},{lo:.17g},{hi:.17g},{int(bool(mesh.exact_flags[j]))},{counts[j]}\n"
        )
    return buf.getvalue()
