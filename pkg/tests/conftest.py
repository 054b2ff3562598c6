import pytest

from debond import problem, solver

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def counterexample_128():
    return solver.solve(problem.preset("counterexample", k=4), 1.0, solver.SolverConfig(h=1 / 128))


@pytest.fixture(scope="session")
def standing_wave_64():
    return solver.solve(problem.preset("standing_wave"), 1.0, solver.SolverConfig(h=1 / 64))


@pytest.fixture(scope="session")
def zero_64():
    return solver.solve(problem.preset("zero"), 1.0, solver.SolverConfig(h=1 / 64))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
