import pytest

from quinary.forms import Q61, GenusDescriptor, seed_search
from quinary.hecke import build_space
from quinary.neighbours import enumerate_genus


@pytest.fixture(scope="session")
def q61():
    return Q61


@pytest.fixture(scope="session")
def genus61():
    return enumerate_genus(seed_search(GenusDescriptor(61, 1)))


@pytest.fixture(scope="session")
def space61(genus61):
    return build_space(genus61)


@pytest.fixture(scope="session")
def genus19():
    return enumerate_genus(seed_search(GenusDescriptor(19, 1)))


@pytest.fixture
def report(request):
    """Write one PASS/FAIL line straight to the terminal (not captured), then assert."""
    tr = request.config.pluginmanager.getplugin("terminalreporter")

    def emit(n, ok, detail=""):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)
        else:
            print(line)
        assert ok, detail

    return emit
