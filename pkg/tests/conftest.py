import json
import time
from importlib import resources

import numpy as np
import pytest

from issuevol.measures import Distribution

CRITERIA: dict[str, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item.user_properties.append(("elapsed", time.perf_counter() - start))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for marker_args in report.user_properties:
        if marker_args[0] == "criterion":
            cid, title = marker_args[1]
            elapsed = dict(report.user_properties).get("elapsed", 0.0)
            CRITERIA[cid] = (title, "PASS" if report.passed else "FAIL", elapsed)


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            item.user_properties.append(("criterion", marker.args))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(CRITERIA, key=lambda c: int(c)):
        title, status, elapsed = CRITERIA[cid]
        terminalreporter.write_line(f"criterion {cid:>2}: {status}  {title}  ({elapsed:.2f} s)")


def random_distributions(n=1000, seed=12345, min_size=2, max_size=64, zeros=True):
    """Random distributions of varied size, concentration and sparsity."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        size = int(rng.integers(min_size, max_size + 1))
        conc = 10.0 ** rng.uniform(-1.5, 1.5)
        shares = rng.dirichlet(np.full(size, conc))
        if zeros and i % 4 == 0 and size > 2:
            shares[rng.choice(size, size // 3, replace=False)] = 0.0
        if shares.sum() == 0:
            shares[0] = 1.0
        out.append(Distribution(
            ((f"i{j}", float(s)) for j, s in enumerate(shares)), lenient=True
        ))
    return out


@pytest.fixture(scope="session")
def random_dists():
    return random_distributions()


def bundled_spec(name):
    ref = resources.files("issuevol").joinpath("data", "regimes", f"{name}.json")
    return json.loads(ref.read_text(encoding="utf-8"))
