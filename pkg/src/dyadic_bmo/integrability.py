"""Exponential integrability of BMO functions.

The distribution inequality forces the exponential mean

    (1/|K|) * integral of exp(zeta * |f - avg_K(f)| / norm)

to stay finite for zeta below 1/(2**n * e).  Integrating the exponential
weight against the distribution tail (layer-cake) and plugging in the
exponential bound gives the closed form 1 + e*q/(1-q) with q = 2**n*e*zeta;
the seminorm factors cancel exactly, so the bound depends only on zeta and
the dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cubes import DyadicCube, root_address
from .grids import GridFunction
from .oscillation import bmo_seminorm


def admissible_limit(dimension: int) -> float:
    """Divergence threshold 1/(2**n * e) for the exponent coefficient."""
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    return 1.0 / ((1 << dimension) * math.e)


def exp_mean(phi: GridFunction, cube: DyadicCube | None = None, zeta: float = 0.0) -> float:
    """Average of exp(zeta*|f - avg|/norm) over ``cube``, exact cell sum."""
    norm = bmo_seminorm(phi).value
    if norm == 0.0:
        raise ValueError("BMO norm is zero")
    if cube is None:
        cube = root_address(phi.dimension)
    block = phi._block(cube)
    return float(np.exp(zeta * np.abs(block - block.mean()) / norm).mean())


def layer_cake_bound(zeta: float, dimension: int) -> float:
    """Closed form of the tail-integral bound: 1 + e*q/(1-q), q = 2**n*e*zeta."""
    if zeta < 0:
        raise ValueError(f"zeta must be non-negative, got {zeta}")
    limit = admissible_limit(dimension)
    if zeta >= limit:
        raise ValueError(
            f"integral diverges at this zeta: {zeta} >= 1/(2**{dimension} * e) = {limit}"
        )
    q = (1 << dimension) * math.e * zeta
    return 1.0 + math.e * q / (1.0 - q)


def layer_cake_bound_alt(zeta: float, dimension: int) -> float:
    """Alternate algebraic arrangement of the same bound, kept as a cross
    check: 1 - 2**n*e**2*zeta / (2**n*e*zeta - 1)."""
    if zeta < 0:
        raise ValueError(f"zeta must be non-negative, got {zeta}")
    if zeta >= admissible_limit(dimension):
        raise ValueError("integral diverges at this zeta")
    scaled = (1 << dimension) * math.e * zeta
    return 1.0 - math.e * scaled / (scaled - 1.0)


@dataclass(frozen=True)
class ExpIntegralReport:
    """One sweep point: exponential mean vs. the layer-cake bound.

    ``bound_alt`` carries the alternate algebraic arrangement of the same
    bound so the two can be compared in the output.
    """

    zeta: float
    lhs: float
    bound: float  # math.inf when inadmissible
    admissible: bool
    bound_alt: float = math.inf

    def to_dict(self) -> dict:
        return {
            "zeta": self.zeta,
            "lhs": self.lhs,
            "bound": None if math.isinf(self.bound) else self.bound,
            "bound_alt": None if math.isinf(self.bound_alt) else self.bound_alt,
            "admissible": self.admissible,
        }


def exp_integrability_sweep(
    phi: GridFunction,
    cube: DyadicCube | None = None,
    zeta_max: float | None = None,
    steps: int = 20,
) -> list[ExpIntegralReport]:
    """Evaluate exp_mean and the bound on a uniform zeta grid (0, zeta_max].

    ``zeta_max`` defaults to 0.95 of the divergence threshold; grid points at
    or above the threshold are reported with ``admissible=False`` and an
    infinite bound.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    limit = admissible_limit(phi.dimension)
    if zeta_max is None:
        zeta_max = 0.95 * limit
    if not zeta_max > 0:
        raise ValueError(f"zeta_max must be positive, got {zeta_max}")
    rows = []
    for i in range(1, steps + 1):
        zeta = zeta_max * i / steps
        admissible = zeta < limit
        bound = layer_cake_bound(zeta, phi.dimension) if admissible else math.inf
        alt = layer_cake_bound_alt(zeta, phi.dimension) if admissible else math.inf
        rows.append(
            ExpIntegralReport(
                zeta=zeta,
                lhs=exp_mean(phi, cube, zeta),
                bound=bound,
                admissible=admissible,
                bound_alt=alt,
            )
        )
    return rows


def sweep_to_csv(rows: list[ExpIntegralReport]) -> str:
    lines = ["zeta,lhs,bound,admissible"]
    for r in rows:
        bound = "inf" if math.isinf(r.bound) else repr(r.bound)
        lines.append(f"{r.zeta!r},{r.lhs!r},{bound},{str(r.admissible).lower()}")
    return "\n".join(lines) + "\n"
