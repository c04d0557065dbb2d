import numpy as np
import pytest

from sketchls import LSProblem, SyntheticSpec, gen_synthetic, solve_exact_ls

_ACCEPTANCE = []


def random_problem(n, d, seed=0, noise=1.0):
    gen = np.random.default_rng(seed)
    A = gen.standard_normal((n, d))
    b = A @ gen.standard_normal(d) + noise * gen.standard_normal(n)
    return LSProblem(A, b)


@pytest.fixture(scope="session")
def desk_problem():
    """Well-conditioned synthetic problem at desk scale (n=4096, d=8)."""
    problem = gen_synthetic(SyntheticSpec(4096, 8, "well", seed=2018))
    return problem, solve_exact_ls(problem)


@pytest.fixture
def record():
    """Register one pass/fail line for the acceptance summary."""
    def _record(criterion, ok, detail=""):
        _ACCEPTANCE.append((criterion, bool(ok), detail))
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {criterion}: {detail}")
