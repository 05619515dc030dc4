import pytest

from hfszemach import load_constants, make_atom


@pytest.fixture(scope="session")
def constants():
    return load_constants("codata-pinned")


@pytest.fixture(scope="session")
def hydrogen(constants):
    return make_atom(constants, "hydrogen")


@pytest.fixture(scope="session")
def muonic(constants):
    return make_atom(constants, "muonic-hydrogen")


@pytest.fixture(params=["hydrogen", "muonic-hydrogen"])
def atom(request, constants):
    return make_atom(constants, request.param)


# acceptance criteria report one line each; printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
