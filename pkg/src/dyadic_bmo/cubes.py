"""Dyadic cube addressing and geometry over an n-dimensional root cube.

A cube is identified purely by integers: its subdivision level and an index
vector, with ``index[i] < 2**level`` per axis.  No floating point enters
identity, containment, or subdivision logic.  Cells are half-open boxes, so
the ``2**(n*level)`` cubes at one level tile the root exactly and pairwise
disjointly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True)
class RootCube:
    """Axis-aligned cube ``[origin_i, origin_i + side)`` per axis."""

    dimension: int
    origin: tuple[float, ...]
    side: float

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        origin = tuple(float(x) for x in self.origin)
        if len(origin) != self.dimension:
            raise ValueError(
                f"origin: expected {self.dimension} coordinates, got {len(origin)}"
            )
        object.__setattr__(self, "origin", origin)
        if not self.side > 0:
            raise ValueError(f"side must be positive, got {self.side}")

    @property
    def volume(self) -> float:
        return self.side ** self.dimension


@dataclass(frozen=True)
class DyadicCube:
    """Address (level, index vector) of one dyadic subcube of the root."""

    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"level must be >= 0, got {self.level}")
        index = tuple(int(k) for k in self.index)
        if not index:
            raise ValueError("index must have at least one axis")
        top = 1 << self.level
        for i, k in enumerate(index):
            if not 0 <= k < top:
                raise ValueError(
                    f"index[{i}]={k} out of range [0, 2**{self.level}) at level {self.level}"
                )
        object.__setattr__(self, "index", index)

    @property
    def dimension(self) -> int:
        return len(self.index)


def root_address(dimension: int) -> DyadicCube:
    """The whole root cube as a level-0 address."""
    return DyadicCube(0, (0,) * dimension)


def children(cube: DyadicCube) -> list[DyadicCube]:
    """The 2**n subcubes of ``cube`` at the next level, lexicographic order.

    Their union is the parent and their interiors are disjoint (half-open
    cells make the tiling literal, not just almost-everywhere).
    """
    n = cube.dimension
    base = tuple(2 * k for k in cube.index)
    return [
        DyadicCube(cube.level + 1, tuple(b + o for b, o in zip(base, offset)))
        for offset in itertools.product((0, 1), repeat=n)
    ]


def parent(cube: DyadicCube) -> DyadicCube:
    if cube.level == 0:
        raise ValueError("the root cube has no parent")
    return DyadicCube(cube.level - 1, tuple(k >> 1 for k in cube.index))


def contains(outer: DyadicCube, inner: DyadicCube) -> bool:
    """True iff every axis range of ``inner`` lies within ``outer``.

    Bit-exact: a deeper cube is inside iff its index, shifted back up to the
    outer level, matches the outer index on every axis.
    """
    if outer.dimension != inner.dimension:
        raise ValueError(
            f"dimension mismatch: {outer.dimension} vs {inner.dimension}"
        )
    shift = inner.level - outer.level
    if shift < 0:
        return False
    return all(k >> shift == j for k, j in zip(inner.index, outer.index))


def volume(cube: DyadicCube, root: RootCube) -> float:
    """Lebesgue measure of the cube: side**n * 2**(-n*level)."""
    if cube.dimension != root.dimension:
        raise ValueError(
            f"dimension mismatch: cube has {cube.dimension}, root has {root.dimension}"
        )
    n = root.dimension
    return root.volume * 2.0 ** (-n * cube.level)


def bounds(cube: DyadicCube, root: RootCube) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """(lower corner, upper corner) of the half-open box the cube occupies."""
    if cube.dimension != root.dimension:
        raise ValueError(
            f"dimension mismatch: cube has {cube.dimension}, root has {root.dimension}"
        )
    scale = root.side * 2.0 ** (-cube.level)
    lows = tuple(o + k * scale for o, k in zip(root.origin, cube.index))
    highs = tuple(lo + scale for lo in lows)
    return lows, highs


def cubes_at_level(dimension: int, level: int) -> Iterator[DyadicCube]:
    """All 2**(n*level) cubes at one level, lexicographic index order."""
    for index in itertools.product(range(1 << level), repeat=dimension):
        yield DyadicCube(level, index)
