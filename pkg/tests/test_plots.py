import pytest

from dyadic_bmo.decomposition import decompose
from dyadic_bmo.grids import generate
from dyadic_bmo.integrability import exp_integrability_sweep
from dyadic_bmo.john_nirenberg import verify_jn
from dyadic_bmo.plots import render_decomposition, render_exp_sweep, render_jn_curve

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_jn_curve_png_deterministic():
    phi = generate("dyadic_martingale", n=1, levels=7, seed=2)
    report = verify_jn(phi, steps=40)
    a = render_jn_curve(report)
    b = render_jn_curve(report)
    assert a[:8] == PNG_MAGIC
    assert a == b


def test_exp_sweep_png():
    phi = generate("step", n=1, levels=3)
    rows = exp_integrability_sweep(phi, steps=10)
    data = render_exp_sweep(rows)
    assert data[:8] == PNG_MAGIC


@pytest.mark.parametrize("n,L", [(1, 6), (2, 4)])
def test_decomposition_png(n, L):
    phi = generate("dyadic_martingale", n=n, levels=L, seed=3)
    decomp = decompose(phi, theta=1.2)
    data = render_decomposition(phi, decomp)
    assert data[:8] == PNG_MAGIC


def test_decomposition_png_rejects_3d():
    phi = generate("dyadic_martingale", n=3, levels=2, seed=0)
    decomp = decompose(phi, theta=1.5)
    with pytest.raises(ValueError, match="n in"):
        render_decomposition(phi, decomp)
