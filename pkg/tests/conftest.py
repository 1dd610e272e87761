import numpy as np
import pytest

from gaugewalk.operators import beam_splitter_x, beam_splitter_y


def brute_force_layers(M, phi, eps=None):
    """Dense U1..U4 written out term by term from the pair sums.

    Independent of the vectorized builder: every coupler is placed with
    explicit basis indices. `eps` maps (layer, a, b) -> (eps_a, eps_b).
    """
    n = M * M

    def idx(x, y):
        return (x - 1) * M + (y - 1)

    def place(u, a, b, v, layer):
        if eps is not None:
            ea, eb = eps[(layer, a, b)]
            v = np.diag(np.exp(1j * np.array([ea, eb]))) @ v
        ia, ib = idx(*a), idx(*b)
        for r, i in enumerate((ia, ib)):
            for c, j in enumerate((ia, ib)):
                u[i, j] = v[r, c]

    layers = []
    for layer in range(4):
        u = np.eye(n, dtype=complex)
        for x in range(1, M + 1):
            for y in range(1, M + 1):
                if layer == 0 and x % 2 == 1:
                    place(u, (x, y), (x + 1, y), beam_splitter_x(), layer)
                elif layer == 1 and x % 2 == 0 and x < M:
                    place(u, (x, y), (x + 1, y), beam_splitter_x(), layer)
                elif layer == 2 and y % 2 == 1:
                    place(u, (x, y), (x, y + 1), beam_splitter_y(x * phi), layer)
                elif layer == 3 and y % 2 == 0 and y < M:
                    place(u, (x, y), (x, y + 1), beam_splitter_y(x * phi), layer)
        layers.append(u)
    return layers


def brute_force_step(M, phi, eps=None):
    u1, u2, u3, u4 = brute_force_layers(M, phi, eps)
    return u4 @ u3 @ u2 @ u1


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_state(rng, dim, batch=None):
    shape = (dim,) if batch is None else (dim, batch)
    v = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line[1])
