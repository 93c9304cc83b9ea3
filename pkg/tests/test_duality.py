import json

import numpy as np
import pytest

from dyadic_bmo.cubes import DyadicCube, RootCube, root_address
from dyadic_bmo.duality import (
    Atom,
    AtomicSum,
    atomic_sum_from_dict,
    atomic_sum_to_dict,
    duality_report,
    functional_apply,
    load_atomic_sum,
    make_haar_atom,
    pair,
    random_atomic_sum,
)
from dyadic_bmo.grids import GridFunction, generate
from dyadic_bmo.oscillation import bmo_seminorm

UNIT_1D = RootCube(1, (0.0,), 1.0)


def test_haar_atom_unit_root():
    atom = make_haar_atom(root_address(1), 0, UNIT_1D, 1)
    assert atom.sup_bound == 1.0
    assert list(atom.values.values) == [1.0, -1.0]


def test_haar_atom_small_support():
    # support of volume 1/4 gives values +-4
    atom = make_haar_atom(DyadicCube(2, (1,)), 0, UNIT_1D, 4)
    block = atom.values.values.reshape(-1)
    nonzero = block[block != 0.0]
    assert set(nonzero) == {4.0, -4.0}
    assert atom.sup_bound == 4.0


def test_haar_atom_finest_level_errors():
    with pytest.raises(ValueError, match="cannot be split"):
        make_haar_atom(DyadicCube(2, (0,)), 0, UNIT_1D, 2)
    with pytest.raises(ValueError, match="axis"):
        make_haar_atom(root_address(1), 1, UNIT_1D, 2)


def test_atom_invariants_enforced():
    grid = GridFunction(UNIT_1D, 1, [1.0, -0.5])  # not mean zero
    with pytest.raises(ValueError, match="mean-zero"):
        Atom(root_address(1), grid, 1.0)
    grid = GridFunction(UNIT_1D, 1, [2.0, -2.0])  # exceeds 1/|support|
    with pytest.raises(ValueError, match="sup bound"):
        Atom(root_address(1), grid, 1.0)
    grid = GridFunction(UNIT_1D, 2, [1.0, -1.0, 0.5, 0.0])  # leaks outside
    with pytest.raises(ValueError, match="outside"):
        Atom(DyadicCube(1, (0,)), grid, 2.0)


def test_pair_examples():
    step = generate("step", n=1, levels=1)
    atom = make_haar_atom(root_address(1), 0, step.root, step.levels)
    assert pair(step, atom) == -0.5
    const = generate("constant", n=1, levels=1, params={"c": 9.0})
    assert pair(const, atom) == 0.0
    # atom supported where the function is constant pairs to zero
    step4 = generate("step", n=1, levels=4)
    left = make_haar_atom(DyadicCube(1, (0,)), 0, step4.root, step4.levels)
    assert pair(step4, left) == 0.0


def test_pair_matches_brute_force():
    from _oracles import brute_pair

    phi = generate("dyadic_martingale", n=2, levels=3, seed=2)
    atom = make_haar_atom(DyadicCube(1, (1, 0)), 1, phi.root, phi.levels)
    assert pair(phi, atom) == pytest.approx(brute_pair(phi, atom), abs=1e-14)


def test_pair_shape_mismatch():
    step = generate("step", n=1, levels=1)
    atom = make_haar_atom(root_address(1), 0, UNIT_1D, 3)
    with pytest.raises(ValueError, match="shape mismatch"):
        pair(step, atom)


def test_functional_linearity_base_cases():
    step = generate("step", n=1, levels=2)
    atom = make_haar_atom(root_address(1), 0, step.root, step.levels)
    assert functional_apply(step, AtomicSum(())) == 0.0
    assert functional_apply(step, AtomicSum(((1.0, atom),))) == pair(step, atom)


def test_functional_two_term_example():
    step = generate("step", n=1, levels=2)
    a1 = make_haar_atom(root_address(1), 0, step.root, step.levels)
    a2 = make_haar_atom(DyadicCube(1, (0,)), 0, step.root, step.levels)
    s = AtomicSum(((2.0, a1), (-1.0, a2)))
    assert functional_apply(step, s) == 2 * pair(step, a1) - pair(step, a2)


def test_functional_linear_in_kappa():
    rng = np.random.default_rng(7)
    phi = generate("dyadic_martingale", n=1, levels=6, seed=1)
    atoms = random_atomic_sum(phi, 6, seed=5)
    pairs = [pair(phi, a) for _, a in atoms.terms]
    for _ in range(25):
        kappas = rng.normal(size=len(pairs))
        s = AtomicSum(tuple((float(k), a) for k, (_, a) in zip(kappas, atoms.terms)))
        expected = float(sum(k * p for k, p in zip(kappas, pairs)))
        assert functional_apply(phi, s) == pytest.approx(expected, abs=1e-12)


def test_single_atom_bound():
    for seed in range(5):
        phi = generate("dyadic_martingale", n=1, levels=8, seed=seed)
        norm = bmo_seminorm(phi).value
        for _, atom in random_atomic_sum(phi, 20, seed=seed).terms:
            value = abs(pair(phi, atom))
            osc = phi.mean_oscillation_about(
                atom.support, phi.cube_average(atom.support)
            )
            assert value <= osc + 1e-12
            assert osc <= norm + 1e-12


def test_pair_shift_invariance():
    phi = generate("dyadic_martingale", n=1, levels=6, seed=3)
    shifted = GridFunction(phi.root, phi.levels, phi.values + 7.0)
    atom = make_haar_atom(DyadicCube(2, (1,)), 0, phi.root, phi.levels)
    assert pair(shifted, atom) == pytest.approx(pair(phi, atom), abs=1e-12)


def test_duality_report_step_equality():
    step = generate("step", n=1, levels=1)
    atom = make_haar_atom(root_address(1), 0, step.root, step.levels)
    report = duality_report(step, AtomicSum(((1.0, atom),)))
    assert report.passed
    assert report.functional_value == -0.5
    assert report.bound == 0.5
    assert report.ratio == 1.0  # equality case
    shifted = GridFunction(step.root, step.levels, step.values + 7.0)
    report2 = duality_report(shifted, AtomicSum(((1.0, atom),)))
    assert report2.functional_value == report.functional_value
    assert report2.passed


def test_duality_random_sums_pass():
    for n, L in ((1, 8), (2, 4)):
        phi = generate("dyadic_martingale", n=n, levels=L, seed=13)
        for seed in range(5):
            s = random_atomic_sum(phi, 40, seed=seed)
            report = duality_report(phi, s)
            assert report.passed
            assert report.ratio <= 1.0 + 1e-12


def test_atomic_sum_json_round_trip(tmp_path):
    phi = generate("dyadic_martingale", n=2, levels=3, seed=4)
    s = random_atomic_sum(phi, 8, seed=2)
    doc = atomic_sum_to_dict(s)
    again = atomic_sum_from_dict(doc, phi.root, phi.levels)
    assert functional_apply(phi, again) == functional_apply(phi, s)
    path = tmp_path / "atoms.json"
    path.write_text(json.dumps(doc))
    loaded = load_atomic_sum(path, phi)
    assert functional_apply(phi, loaded) == functional_apply(phi, s)


def test_atomic_sum_bad_documents():
    with pytest.raises(ValueError, match="terms"):
        atomic_sum_from_dict({"atoms": []}, UNIT_1D, 2)
    doc = {"terms": [{"kappa": 1.0, "support": {"level": 0, "index": [0]}, "kind": "bump"}]}
    with pytest.raises(ValueError, match="unknown atom kind"):
        atomic_sum_from_dict(doc, UNIT_1D, 2)
    doc = {"terms": [{"support": {"level": 0, "index": [0]}}]}
    with pytest.raises(ValueError, match=r"terms\[0\]"):
        atomic_sum_from_dict(doc, UNIT_1D, 2)
