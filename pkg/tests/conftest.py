import pytest

from amalgrank import automaton as am
from amalgrank.groups import cyclic, direct_product, permutation_group
from amalgrank.words import free_product


@pytest.fixture(scope="session")
def z2z3():
    return free_product(cyclic(2), cyclic(3))


@pytest.fixture(scope="session")
def z2v4():
    return free_product(cyclic(2), direct_product(cyclic(2), cyclic(2)))


@pytest.fixture(scope="session")
def z2z2z2():
    return free_product(cyclic(2), cyclic(2), cyclic(2))


def s3_images():
    """S3 with a -> (12), b -> (123), as (group, images per factor)."""
    S3, elems = permutation_group([(1, 0, 2), (1, 2, 0)], name="S3")
    t, c = elems.index((1, 0, 2)), elems.index((1, 2, 0))
    return S3, [lambda k: S3.power(t, k), lambda k: S3.power(c, k)]


@pytest.fixture(scope="session")
def s3_kernel(z2z3):
    S3, images = s3_images()
    return am.cayley_automaton(z2z3, S3, images)


# --- acceptance report: one line per criterion -------------------------------------

_criteria: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    label = getattr(item.function, "criterion", None)
    if label is None:
        return
    if rep.when == "call" or rep.outcome != "passed":
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        if _criteria.get(item.nodeid, ("PASS",))[0] == "PASS":
            _criteria[item.nodeid] = (status, label)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for status, label in sorted(_criteria.values(), key=lambda v: v[1]):
        terminalreporter.write_line(f"{status}  {label}")
