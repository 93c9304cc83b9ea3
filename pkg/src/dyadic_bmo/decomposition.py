"""Stopping-time cube decomposition and its feature checker.

``decompose`` runs the generation-by-generation selection that drives the
John-Nirenberg argument: normalize the function by its dyadic BMO seminorm,
then, inside each cube selected in the previous generation, subdivide and
select every maximal subcube whose mean oscillation about the reference
average first exceeds the threshold theta > 1.  The selected cubes of one
generation are pairwise disjoint and nest inside the previous generation
(matryoshka fashion).

``check_features`` re-derives every quantitative claim about a decomposition
from the raw cells: the complement bound, the average-jump bound, the
selection window, the geometric measure decay, and the telescoped pointwise
bound on each generation's complement.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cubes import DyadicCube, RootCube, root_address
from .grids import GridFunction
from .oscillation import _pooled_sums, bmo_seminorm

_TOL = 1e-12

_OFFSETS: dict[int, list[tuple[int, ...]]] = {}


def _offsets(n: int) -> list[tuple[int, ...]]:
    if n not in _OFFSETS:
        _OFFSETS[n] = list(itertools.product((0, 1), repeat=n))
    return _OFFSETS[n]


@dataclass(frozen=True)
class SelectedCube:
    """One selected cube with the averages that drove its selection.

    ``base_average`` is the reference average (over the previous-generation
    ancestor) the oscillation was measured against; ``own_average`` becomes
    the reference for the next generation inside this cube.
    """

    cube: DyadicCube
    base_average: float
    own_average: float
    oscillation: float
    parent_selected: "SelectedCube | None"


@dataclass
class Decomposition:
    """Generations of selected cubes for one function and threshold."""

    root: DyadicCube
    root_box: RootCube
    theta: float
    normalization: float
    root_entry: SelectedCube
    generations: list[list[SelectedCube]]
    truncated_at_level: bool

    @property
    def max_generation(self) -> int:
        return len(self.generations)

    def generation(self, lam: int) -> list[SelectedCube]:
        """Selected cubes of generation ``lam`` (1-based); lam=0 is the root."""
        if lam == 0:
            return [self.root_entry]
        if not 1 <= lam <= self.max_generation:
            raise ValueError(f"generation {lam} out of range 0..{self.max_generation}")
        return self.generations[lam - 1]

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "normalization": self.normalization,
            "generations": [
                [
                    {
                        "level": sc.cube.level,
                        "index": list(sc.cube.index),
                        "base_average": sc.base_average,
                        "own_average": sc.own_average,
                        "oscillation": sc.oscillation,
                    }
                    for sc in gen
                ]
                for gen in self.generations
            ],
            "root": {"level": self.root.level, "index": list(self.root.index)},
            "max_generation": self.max_generation,
            "truncated_at_level": self.truncated_at_level,
        }


def decompose(
    phi: GridFunction,
    root: DyadicCube | None = None,
    theta: float = math.e,
    max_generations: int = 5,
) -> Decomposition:
    """Run the stopping-time selection on ``phi`` normalized to unit seminorm.

    A descendant cube enters generation ``lam`` iff its mean oscillation
    about the generation-(lam-1) reference average exceeds ``theta`` and its
    subdivision parent's does not (maximal cubes; traversal is depth-first
    with children in lexicographic order, and each generation list is sorted
    by level then index, so the result is deterministic).

    Selection cannot descend below the grid's finest level; when a
    non-selected cube bottoms out there, ``truncated_at_level`` is set.  On
    those cells the function equals its own shrunk average, so the
    complement bound is exact rather than almost-everywhere.
    """
    norm = bmo_seminorm(phi).value
    if norm == 0.0:
        raise ValueError("BMO norm is zero")
    if not theta > 1.0:
        raise ValueError(f"theta must exceed 1, got {theta}")
    if max_generations < 1:
        raise ValueError(f"max_generations must be >= 1, got {max_generations}")
    n, levels = phi.dimension, phi.levels
    if root is None:
        root = root_address(n)
    if root.dimension != n:
        raise ValueError(f"root cube dimension {root.dimension} does not match grid {n}")
    if root.level > levels:
        raise ValueError(f"root cube level {root.level} exceeds grid levels {levels}")

    psi = phi._grid / norm
    # Per-level value sums, pooled bottom-up once; averages are sums/cells.
    psums = _pooled_sums(psi, levels)
    offsets = _offsets(n)

    def block(cube: DyadicCube) -> np.ndarray:
        scale = 1 << (levels - cube.level)
        return psi[tuple(slice(k * scale, (k + 1) * scale) for k in cube.index)]

    def own_average(cube: DyadicCube) -> float:
        cells = 1 << (n * (levels - cube.level))
        return float(psums[cube.level][cube.index] / cells)

    root_avg = own_average(root)
    root_entry = SelectedCube(
        cube=root,
        base_average=root_avg,
        own_average=root_avg,
        oscillation=float(np.abs(block(root) - root_avg).mean()),
        parent_selected=None,
    )

    truncated = False
    generations: list[list[SelectedCube]] = []
    previous = [root_entry]
    for _ in range(max_generations):
        current: list[SelectedCube] = []
        for sc in previous:
            depth_max = levels - sc.cube.level
            if depth_max == 0:
                continue
            # Pool |psi - base| once over this cube's subtree; the oscillation
            # of any descendant about the fixed base is then a lookup.
            asums = _pooled_sums(np.abs(block(sc.cube) - sc.own_average), depth_max)

            def walk(depth: int, sub_index: tuple[int, ...], sc=sc, asums=asums, depth_max=depth_max) -> None:
                nonlocal truncated
                cells = 1 << (n * (depth_max - depth))
                osc = float(asums[depth][sub_index] / cells)
                if osc > theta:
                    cube = DyadicCube(
                        sc.cube.level + depth,
                        tuple((k << depth) + s for k, s in zip(sc.cube.index, sub_index)),
                    )
                    current.append(
                        SelectedCube(
                            cube=cube,
                            base_average=sc.own_average,
                            own_average=own_average(cube),
                            oscillation=osc,
                            parent_selected=sc,
                        )
                    )
                elif depth < depth_max:
                    for offset in offsets:
                        walk(depth + 1, tuple(2 * s + o for s, o in zip(sub_index, offset)))
                else:
                    truncated = True

            for offset in offsets:
                walk(1, offset)
        current.sort(key=lambda s: (s.cube.level, s.cube.index))
        generations.append(current)
        previous = current

    return Decomposition(
        root=root,
        root_box=phi.root,
        theta=theta,
        normalization=norm,
        root_entry=root_entry,
        generations=generations,
        truncated_at_level=truncated,
    )


# ---------------------------------------------------------------------------
# Feature checker


@dataclass(frozen=True)
class FeatureCheck:
    name: str
    passed: bool
    worst_slack: float  # math.inf when the check is vacuous

    def to_dict(self) -> dict:
        slack = None if math.isinf(self.worst_slack) else self.worst_slack
        return {"passed": self.passed, "worst_slack": slack}


@dataclass
class FeatureReport:
    """Pass/fail plus worst-case slack for every asserted feature.

    ``pointwise_bound_tight`` re-runs the complement bound at the tighter
    height ``2^n * lam * theta`` (no trailing ``+theta`` term); it is
    informational and not part of ``all_passed``.
    """

    theta: float
    checks: dict[str, FeatureCheck]
    pointwise_bound_tight: FeatureCheck
    generation_measures: list[float] = field(default_factory=list)

    GATED = (
        "complement_bound",
        "average_jump",
        "selection_window",
        "measure_decay",
        "pointwise_bound",
    )

    @property
    def all_passed(self) -> bool:
        return all(self.checks[name].passed for name in self.GATED)

    def to_dict(self) -> dict:
        return {
            "check": "stopping-decomposition-features",
            "theta": self.theta,
            "passed": self.all_passed,
            "checks": {name: c.to_dict() for name, c in self.checks.items()},
            "pointwise_bound_tight": self.pointwise_bound_tight.to_dict(),
            "generation_measures": self.generation_measures,
        }


def _ensure_match(phi: GridFunction, decomp: Decomposition) -> float:
    if decomp.root_box != phi.root:
        raise ValueError("decomposition does not match function: different root cube")
    if decomp.root.level > phi.levels:
        raise ValueError("decomposition does not match function: root deeper than grid")
    norm = bmo_seminorm(phi).value
    if norm == 0.0 or abs(norm - decomp.normalization) > 1e-9 * max(1.0, norm):
        raise ValueError(
            "decomposition does not match function: normalization "
            f"{decomp.normalization} vs seminorm {norm}"
        )
    return norm


def check_features(phi: GridFunction, decomp: Decomposition) -> FeatureReport:
    """Re-verify every feature of a decomposition from the raw cells.

    Nothing stored on the decomposition is trusted except the cube
    selection itself: all averages, oscillations, and measures are
    recomputed directly from the grid values.
    """
    norm = _ensure_match(phi, decomp)
    n, levels = phi.dimension, phi.levels
    psi = phi._grid / norm
    theta = decomp.theta
    factor = (1 << n) * theta
    cellvol = phi.cell_volume

    def slices(cube: DyadicCube):
        scale = 1 << (levels - cube.level)
        return tuple(slice(k * scale, (k + 1) * scale) for k in cube.index)

    def cover_mask(gen: list[SelectedCube]) -> np.ndarray:
        mask = np.zeros(psi.shape, dtype=bool)
        for sc in gen:
            mask[slices(sc.cube)] = True
        return mask

    root_sl = slices(decomp.root)
    root_avg = float(psi[root_sl].mean())

    # (a) complement bound: outside the next generation, deviation from the
    # reference average stays below theta.
    worst_a = math.inf
    previous = [decomp.root_entry]
    for gen in decomp.generations:
        cov = cover_mask(gen)
        for sc in previous:
            ssl = slices(sc.cube)
            outside = ~cov[ssl]
            if outside.any():
                base = psi[ssl].mean()
                maxdev = float(np.abs(psi[ssl][outside] - base).max())
                worst_a = min(worst_a, theta - maxdev)
        previous = gen

    # (b) average jump and (c) selection window, per selected cube.
    worst_b = math.inf
    worst_c = math.inf
    for gen in decomp.generations:
        for sc in gen:
            own = float(psi[slices(sc.cube)].mean())
            base = float(psi[slices(sc.parent_selected.cube)].mean())
            worst_b = min(worst_b, factor - abs(own - base))
            osc = float(np.abs(psi[slices(sc.cube)] - base).mean())
            worst_c = min(worst_c, osc - theta, factor - osc)

    # (d) measure decay: one-step 1/theta contraction and the cumulative
    # theta**-lam bound against the root measure.
    root_measure = psi[root_sl].size * cellvol
    measures = [root_measure]
    for gen in decomp.generations:
        total = sum(psi[slices(sc.cube)].size for sc in gen)
        measures.append(total * cellvol)
    worst_d = math.inf
    for lam in range(1, len(measures)):
        worst_d = min(worst_d, measures[lam - 1] / theta - measures[lam])
        worst_d = min(worst_d, root_measure * theta ** (-lam) - measures[lam])

    # (e) telescoped pointwise bound on each generation's complement, plus
    # the tighter-height variant.
    worst_e = math.inf
    worst_tight = math.inf
    root_devs = np.abs(psi[root_sl] - root_avg)
    for lam, gen in enumerate(decomp.generations, start=1):
        outside = ~cover_mask(gen)[root_sl]
        maxdev = float(root_devs[outside].max()) if outside.any() else 0.0
        worst_e = min(worst_e, lam * factor + theta - maxdev)
        worst_tight = min(worst_tight, lam * factor - maxdev)

    def result(name: str, slack: float) -> FeatureCheck:
        return FeatureCheck(name, passed=slack >= -_TOL, worst_slack=slack)

    checks = {
        "complement_bound": result("complement_bound", worst_a),
        "average_jump": result("average_jump", worst_b),
        "selection_window": result("selection_window", worst_c),
        "measure_decay": result("measure_decay", worst_d),
        "pointwise_bound": result("pointwise_bound", worst_e),
    }
    return FeatureReport(
        theta=theta,
        checks=checks,
        pointwise_bound_tight=result("pointwise_bound_tight", worst_tight),
        generation_measures=measures[1:],
    )
