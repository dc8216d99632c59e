import numpy as np
import pytest
from hypothesis import strategies as st

from relaxflux.grid import BoundarySpec, Mesh, Periodic, build_mesh

finite = dict(allow_nan=False, allow_infinity=False)
densities = st.floats(0.05, 20.0, **finite)
velocities = st.floats(-5.0, 5.0, **finite)
temperatures = st.floats(0.05, 20.0, **finite)
gammas = st.sampled_from([1.4, 5.0 / 3.0, 1.2])


@st.composite
def primitive_states(draw):
    return np.array([draw(densities), draw(velocities), draw(velocities), draw(temperatures)])


@st.composite
def gradients(draw, scale=3.0):
    g = st.floats(-scale, scale, **finite)
    return np.array([draw(g) for _ in range(4)])


def uniform_mesh(nx, ny, extent=(0.0, 1.0, 0.0, 1.0)) -> Mesh:
    return build_mesh({"extent": extent, "n": (nx, ny)})


def random_field(rng, nx, ny, amp=0.1):
    """Smooth-ish admissible primitive field around (1, 0.3, -0.2, 1)."""
    base = np.array([1.0, 0.3, -0.2, 1.0])[:, None, None]
    return base + amp * rng.uniform(-1, 1, (4, nx, ny))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def periodic():
    return BoundarySpec.all(Periodic())


# acceptance criteria report one line each; printed again in the terminal summary
ACCEPTANCE_LINES = []


def record_criterion(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
