import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from qbfproof.formula import parse_qdimacs  # noqa: E402
from qbfproof.mres import parse_mres  # noqa: E402

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
MRES_FIXTURES = sorted(p.stem for p in FIXTURES.glob("*.mres"))


def load_fixture(name):
    f = parse_qdimacs((FIXTURES / f"{name}.qdimacs").read_text())
    p = parse_mres((FIXTURES / f"{name}.mres").read_text())
    return f, p


@pytest.fixture(params=MRES_FIXTURES)
def mres_fixture(request):
    f, p = load_fixture(request.param)
    return request.param, f, p


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
