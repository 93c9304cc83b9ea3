"""The John-Nirenberg distribution inequality, checked empirically.

For a BMO function and any dyadic cube K, the measure of the set where the
function deviates from its K-average by more than alpha is controlled by

    e * |K| * exp(-alpha / (2**n * e * norm)),

with ``norm`` the dyadic BMO seminorm.  ``verify_jn`` sweeps alpha and
compares this bound against the exact empirical distribution measure;
``containment_check`` verifies the covering step the bound rests on: the
level set at height ``lam * 2**n * theta + theta`` lies inside the union of
the generation-lam selected cubes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cubes import DyadicCube, root_address
from .cubes import volume as cube_volume
from .decomposition import Decomposition, _ensure_match
from .grids import GridFunction
from .oscillation import bmo_seminorm

_TOL = 1e-12


def jn_bound(volume: float, alpha: float, norm: float, dimension: int) -> float:
    """Right side of the distribution inequality: e*|K|*exp(-alpha/(2^n e norm))."""
    if not volume > 0:
        raise ValueError(f"volume must be positive, got {volume}")
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    if not norm > 0:
        raise ValueError(f"norm must be positive, got {norm}")
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    return math.e * volume * math.exp(-alpha / ((1 << dimension) * math.e * norm))


@dataclass
class JnReport:
    """Empirical distribution measure vs. the exponential bound on one cube."""

    cube: DyadicCube
    norm: float
    alphas: list[float]
    empirical: list[float]
    bound: list[float]
    dominated: bool
    max_ratio: float

    def to_dict(self) -> dict:
        return {
            "check": "john-nirenberg-distribution",
            "cube": {"level": self.cube.level, "index": list(self.cube.index)},
            "norm": self.norm,
            "dominated": self.dominated,
            "max_ratio": self.max_ratio,
            "alphas": self.alphas,
            "empirical": self.empirical,
            "bound": self.bound,
        }

    def to_csv(self) -> str:
        lines = ["alpha,empirical,bound"]
        for a, e, b in zip(self.alphas, self.empirical, self.bound):
            lines.append(f"{a!r},{e!r},{b!r}")
        return "\n".join(lines) + "\n"


def verify_jn(
    phi: GridFunction,
    cube: DyadicCube | None = None,
    alpha_max: float | None = None,
    steps: int = 100,
) -> JnReport:
    """Sweep alpha over a uniform grid on (0, alpha_max] and compare sides.

    The empirical side is exact cell counting (identical to
    ``distribution_measure`` at every alpha), so domination needs no
    tolerance beyond 1e-12 arithmetic slack.  ``alpha_max`` defaults to
    10 * seminorm.
    """
    norm = bmo_seminorm(phi).value
    if norm == 0.0:
        raise ValueError("BMO norm is zero")
    if cube is None:
        cube = root_address(phi.dimension)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if alpha_max is None:
        alpha_max = 10.0 * norm
    if not alpha_max > 0:
        raise ValueError(f"alpha_max must be positive, got {alpha_max}")

    block = phi._block(cube)
    devs = np.sort(np.abs(block - block.mean()).reshape(-1))
    cellvol = phi.cell_volume
    vol = cube_volume(cube, phi.root)

    alphas = [alpha_max * i / steps for i in range(1, steps + 1)]
    counts = devs.size - np.searchsorted(devs, np.asarray(alphas), side="right")
    empirical = [float(c) * cellvol for c in counts]
    bound = [jn_bound(vol, a, norm, phi.dimension) for a in alphas]

    dominated = all(e <= b + _TOL for e, b in zip(empirical, bound))
    ratios = [e / b for e, b in zip(empirical, bound) if b > 0]
    max_ratio = max(ratios) if ratios else 0.0
    return JnReport(
        cube=cube,
        norm=norm,
        alphas=alphas,
        empirical=empirical,
        bound=bound,
        dominated=dominated,
        max_ratio=max_ratio,
    )


@dataclass(frozen=True)
class ContainmentCheck:
    """Level-set coverage by one generation of selected cubes.

    ``slack`` is the bound height minus the largest deviation found outside
    the generation's union (0 when no cell is outside).  The tight-variant
    fields re-run the same test at height ``2^n * lam * theta``.
    """

    generation: int
    passed: bool
    slack: float
    tight_passed: bool
    tight_slack: float

    def to_dict(self) -> dict:
        return {
            "generation": self.generation,
            "passed": self.passed,
            "slack": self.slack,
            "tight_passed": self.tight_passed,
            "tight_slack": self.tight_slack,
        }


def containment_check(phi: GridFunction, decomp: Decomposition, generation: int) -> ContainmentCheck:
    """Check that {|psi - root avg| > lam*2^n*theta + theta} lies inside the
    union of generation-``lam`` cubes (psi is phi normalized by its seminorm)."""
    norm = _ensure_match(phi, decomp)
    if not 0 <= generation <= decomp.max_generation:
        raise ValueError(
            f"generation {generation} out of range 0..{decomp.max_generation}"
        )
    n, levels = phi.dimension, phi.levels
    psi = phi._grid / norm
    theta = decomp.theta
    factor = (1 << n) * theta

    def slices(cube: DyadicCube):
        scale = 1 << (levels - cube.level)
        return tuple(slice(k * scale, (k + 1) * scale) for k in cube.index)

    root_sl = slices(decomp.root)
    root_block = psi[root_sl]
    devs = np.abs(root_block - root_block.mean())
    cover = np.zeros(psi.shape, dtype=bool)
    for sc in decomp.generation(generation):
        cover[slices(sc.cube)] = True
    outside = ~cover[root_sl]

    maxdev = float(devs[outside].max()) if outside.any() else 0.0
    height = generation * factor + theta
    tight_height = generation * factor
    return ContainmentCheck(
        generation=generation,
        passed=height - maxdev >= -_TOL,
        slack=height - maxdev,
        tight_passed=tight_height - maxdev >= -_TOL,
        tight_slack=tight_height - maxdev,
    )
