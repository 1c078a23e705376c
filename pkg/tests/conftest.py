import json
import pathlib

import pytest

from thinflow.kernel import Grid, eval_kernel
from thinflow.profiles import continuation_family

HERE = pathlib.Path(__file__).parent


@pytest.fixture(scope="session")
def frozen():
    """Independently computed reference values (see tests/oracles/)."""
    with open(HERE / "frozen_values.json") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def table_1d():
    return eval_kernel(1, Grid(1, 0.05, 22.0), 8)


@pytest.fixture(scope="session")
def table_1d_wide():
    """Wider truncation radius; the order-5 biorthogonality integrands only
    cancel beyond |y| ~ 30."""
    return eval_kernel(1, Grid(1, 0.05, 36.0), 5)


@pytest.fixture(scope="session")
def table_2d():
    return eval_kernel(2, Grid(2, 0.1, 22.0), 5)


# The two shooting families cost ~40 s and ~100 s; computed once and shared
# between the unit tests and the acceptance checks.

@pytest.fixture(scope="session")
def global_family():
    return continuation_family("global", 0, [0.2, 0.1, 0.05])


@pytest.fixture(scope="session")
def blowup_family():
    return continuation_family("blowup", 1, [0.2, 0.1, 0.05])
