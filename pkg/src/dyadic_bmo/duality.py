"""Atoms, finite atomic sums, and the BMO pairing functional.

An atom is a mean-zero bump supported on a dyadic cube with sup norm at most
the reciprocal of the support's volume.  Pairing a function against an atom
kills constants, so the pairing is controlled by the mean oscillation over
the support and hence by the BMO seminorm; summing, a finite atomic
combination eta = sum kappa_j * tau_j obeys

    |integral of phi * eta| <= sum |kappa_j| * seminorm(phi).

Atoms here live on dyadic cubes (not balls): the inequality chain only uses
the mean-zero property, the sup bound, and the oscillation over the support,
and cube supports keep every quantity exact on the grid.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import IO

import numpy as np

from .cubes import DyadicCube, RootCube, volume
from .grids import GridFunction
from .oscillation import bmo_seminorm

_TOL = 1e-12


@dataclass(frozen=True)
class Atom:
    """Mean-zero bounded bump on a dyadic cube, stored on the full grid.

    ``values`` shares the paired function's root and levels and vanishes
    outside ``support``; ``sup_bound`` is 1/|support|.  ``kind``/``axis``
    record how the atom was built so sums of haar atoms can round-trip
    through JSON.
    """

    support: DyadicCube
    values: GridFunction
    sup_bound: float
    kind: str = "custom"
    axis: int | None = None

    def __post_init__(self):
        grid = self.values
        vol = volume(self.support, grid.root)
        if abs(self.sup_bound - 1.0 / vol) > _TOL * max(1.0, 1.0 / vol):
            raise ValueError(f"sup_bound must be 1/|support| = {1.0 / vol}")
        block = grid._block(self.support)
        integral = float(block.sum()) * grid.cell_volume
        if abs(integral) > _TOL:
            raise ValueError(f"atom is not mean-zero: integral {integral}")
        if float(np.abs(block).max(initial=0.0)) > self.sup_bound * (1 + 1e-9) + _TOL:
            raise ValueError("atom exceeds its sup bound 1/|support|")
        mask = np.zeros(grid._grid.shape, dtype=bool)
        scale = 1 << (grid.levels - self.support.level)
        mask[tuple(slice(k * scale, (k + 1) * scale) for k in self.support.index)] = True
        if np.any(grid._grid[~mask] != 0.0):
            raise ValueError("atom has support outside its cube")


def make_haar_atom(
    support: DyadicCube, axis: int, root: RootCube, levels: int
) -> Atom:
    """Haar-type atom: +1/|support| on the lower half of the support along
    ``axis``, -1/|support| on the upper half."""
    n = root.dimension
    if support.dimension != n:
        raise ValueError(f"support dimension {support.dimension} does not match root {n}")
    if not 0 <= axis < n:
        raise ValueError(f"axis {axis} out of range for dimension {n}")
    if support.level >= levels:
        raise ValueError(
            f"support at level {support.level} cannot be split (grid levels {levels})"
        )
    height = 1.0 / volume(support, root)
    m = 1 << levels
    scale = 1 << (levels - support.level)
    arr = np.zeros((m,) * n)
    block = arr[tuple(slice(k * scale, (k + 1) * scale) for k in support.index)]
    half = scale // 2
    lower = [slice(None)] * n
    upper = [slice(None)] * n
    lower[axis] = slice(0, half)
    upper[axis] = slice(half, scale)
    block[tuple(lower)] = height
    block[tuple(upper)] = -height
    return Atom(
        support=support,
        values=GridFunction(root, levels, arr.reshape(-1)),
        sup_bound=height,
        kind="haar",
        axis=axis,
    )


def _check_shape(phi: GridFunction, atom: Atom) -> None:
    g = atom.values
    if g.root != phi.root or g.levels != phi.levels:
        raise ValueError(
            "shape mismatch: atom grid does not share the function's root and levels"
        )


def pair(phi: GridFunction, atom: Atom) -> float:
    """Integral of phi * tau over the support, as an exact cell sum."""
    _check_shape(phi, atom)
    a = phi._block(atom.support)
    b = atom.values._block(atom.support)
    return float((a * b).sum()) * phi.cell_volume


@dataclass(frozen=True)
class AtomicSum:
    """Finite linear combination sum kappa_j * tau_j."""

    terms: tuple[tuple[float, Atom], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((float(k), a) for k, a in self.terms)
        )

    def kappa_l1(self) -> float:
        return sum(abs(k) for k, _ in self.terms)


def functional_apply(phi: GridFunction, s: AtomicSum) -> float:
    """Pairing functional on an atomic sum, summed in term order."""
    return sum(k * pair(phi, a) for k, a in s.terms)


@dataclass(frozen=True)
class DualityReport:
    functional_value: float
    kappa_l1: float
    norm: float
    bound: float
    passed: bool
    ratio: float

    def to_dict(self) -> dict:
        return {
            "check": "h1-bmo-duality-bound",
            "functional_value": self.functional_value,
            "kappa_l1": self.kappa_l1,
            "norm": self.norm,
            "bound": self.bound,
            "passed": self.passed,
            "ratio": self.ratio,
        }


def duality_report(phi: GridFunction, s: AtomicSum) -> DualityReport:
    """Check |sum kappa_j * <phi, tau_j>| <= sum|kappa_j| * seminorm(phi)."""
    value = functional_apply(phi, s)
    norm = bmo_seminorm(phi).value
    kappa_l1 = s.kappa_l1()
    bound = kappa_l1 * norm
    return DualityReport(
        functional_value=value,
        kappa_l1=kappa_l1,
        norm=norm,
        bound=bound,
        passed=abs(value) <= bound + _TOL,
        ratio=abs(value) / bound if bound > 0 else 0.0,
    )


# ---------------------------------------------------------------------------
# JSON interchange for haar atomic sums


def atomic_sum_to_dict(s: AtomicSum) -> dict:
    terms = []
    for kappa, atom in s.terms:
        if atom.kind != "haar":
            raise ValueError(f"only haar atoms serialize to JSON, got kind {atom.kind!r}")
        terms.append(
            {
                "kappa": kappa,
                "support": {"level": atom.support.level, "index": list(atom.support.index)},
                "kind": "haar",
                "axis": atom.axis,
            }
        )
    return {"terms": terms}


def atomic_sum_from_dict(doc, root: RootCube, levels: int) -> AtomicSum:
    if not isinstance(doc, dict) or "terms" not in doc:
        raise ValueError("atomic sum: expected an object with a 'terms' array")
    terms = []
    for i, t in enumerate(doc["terms"]):
        try:
            kappa = float(t["kappa"])
            support = DyadicCube(int(t["support"]["level"]), tuple(t["support"]["index"]))
            kind = t.get("kind", "haar")
            axis = int(t.get("axis", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"terms[{i}]: {exc}") from None
        if kind != "haar":
            raise ValueError(f"terms[{i}]: unknown atom kind {kind!r}")
        terms.append((kappa, make_haar_atom(support, axis, root, levels)))
    return AtomicSum(tuple(terms))


def load_atomic_sum(source: str | os.PathLike | IO[str], like: GridFunction) -> AtomicSum:
    if isinstance(source, (str, os.PathLike)):
        with open(os.fspath(source), "r", encoding="utf-8") as fh:
            return load_atomic_sum(fh, like)
    return atomic_sum_from_dict(json.load(source), like.root, like.levels)


def random_atomic_sum(phi: GridFunction, count: int, seed: int = 0) -> AtomicSum:
    """Seeded random haar atoms with normal coefficients (for stress tests)."""
    if phi.levels < 1:
        raise ValueError("grid needs at least one level to host an atom")
    rng = np.random.default_rng(seed)
    n = phi.dimension
    terms = []
    for _ in range(count):
        level = int(rng.integers(0, phi.levels))
        index = tuple(int(rng.integers(0, 1 << level)) for _ in range(n))
        axis = int(rng.integers(0, n))
        kappa = float(rng.normal())
        terms.append((kappa, make_haar_atom(DyadicCube(level, index), axis, phi.root, phi.levels)))
    return AtomicSum(tuple(terms))
