import numpy as np
import pytest

from grover_coherence import Stage, coherence_sweep, make_config

# the seven-point order grid exercised throughout: both branches, both limits
ALPHA_GRID = (0.3, 0.5, 0.7, 1.0 - 1e-7, 1.0 + 1e-7, 1.5, 2.0)

EXAMPLE1_N = 16
EXAMPLE1_TARGETS = (0, 1)


@pytest.fixture(scope="session")
def example1_config():
    return make_config(EXAMPLE1_N, list(EXAMPLE1_TARGETS))


@pytest.fixture(scope="session")
def example1_sweep(example1_config):
    """Full-trajectory coherence series for the worked 16-qubit, 2-target case."""
    return coherence_sweep(
        example1_config,
        alphas=ALPHA_GRID,
        stages=(Stage.PSI, Stage.HADAMARD_O, Stage.HADAMARD_P),
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
