import pytest

from dyadic_bmo.grids import generate

SUITE_LEVELS = {1: 10, 2: 5}


def generator_suite(n, martingales=10, levels=None):
    """Named non-constant test functions: step, spike, log, seeded martingales."""
    L = levels if levels is not None else SUITE_LEVELS[n]
    functions = [
        ("step", generate("step", n=n, levels=L)),
        ("spike", generate("spike", n=n, levels=L, params={"h": 12.0})),
        ("log_singularity", generate("log_singularity", n=n, levels=L)),
    ]
    for seed in range(martingales):
        functions.append(
            (f"martingale[{seed}]", generate("dyadic_martingale", n=n, levels=L, seed=seed))
        )
    return functions


@pytest.fixture(scope="session")
def small_suite():
    """A quick cross-section: a few functions per dimension."""
    return {n: generator_suite(n, martingales=4) for n in (1, 2)}
