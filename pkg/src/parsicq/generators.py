"""Generating functions of A-stable linear multistep methods."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, NumericalError


def _euler(zeta):
    return 1.0 - zeta


def _bdf2(zeta):
    w = 1.0 - zeta
    return w + 0.5 * w * w


def _trapezoidal(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta == -1.0):
        raise NumericalError("pole of generating function")
    return 2.0 * (1.0 - zeta) / (1.0 + zeta)


@dataclass(frozen=True)
class Generator:
    """Generating function ``delta`` of a multistep method and its order."""

    method: str
    func: Callable
    classical_order: int

    def delta(self, zeta):
        return self.func(np.asarray(zeta, dtype=complex))

    __call__ = delta


IMPLICIT_EULER = Generator("euler", _euler, 1)
BDF2 = Generator("bdf2", _bdf2, 2)
TRAPEZOIDAL = Generator("trapezoidal", _trapezoidal, 2)

GENERATORS = {g.method: g for g in (IMPLICIT_EULER, BDF2, TRAPEZOIDAL)}


def get_generator(name: str) -> Generator:
    try:
        return GENERATORS[name.lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown method {name!r}; choose from {sorted(GENERATORS)}"
        ) from None


def delta(gen: Generator, zeta):
    """Evaluate ``gen``'s generating function at ``zeta``."""
    return gen.delta(zeta)
