"""Shared fixtures: the headline sandwich on four points, its congruence
lattice via both pipelines, and a sweep over every idempotent sandwich on
up to four points."""

import pytest

from varcong import (build_context, enumerate_all_congruences,
                     enumerate_structurally)
from varcong.transform import idempotents

HEADLINE = "4: 1 2 3 3"


@pytest.fixture(scope="session")
def headline_ctx():
    return build_context(HEADLINE)


@pytest.fixture(scope="session")
def headline_oracle(headline_ctx):
    """All congruences of the regular part, by principal-closure saturation."""
    return enumerate_all_congruences(headline_ctx.P)


@pytest.fixture(scope="session")
def headline_ll(headline_ctx):
    return enumerate_structurally(headline_ctx)


def sweep_sandwiches(n_max=4):
    out = []
    for n in range(1, n_max + 1):
        out.extend(idempotents(n))
    return out


@pytest.fixture(scope="session")
def sweep():
    """(context, layered lattice) for every idempotent sandwich, n <= 4."""
    pairs = []
    for a in sweep_sandwiches():
        ctx = build_context(a)
        pairs.append((ctx, enumerate_structurally(ctx)))
    return pairs


def pytest_configure(config):
    config._criterion_results = {}


@pytest.fixture()
def criterion(pytestconfig):
    """Record one summary line per reproduction target, then assert it."""
    results = pytestconfig._criterion_results

    def record(num, ok, detail):
        passed, notes = results.get(num, (True, []))
        results[num] = (passed and ok, notes + [detail])
        assert ok, f"criterion {num}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criterion_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        ok, notes = results[num]
        word = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {word}  ({'; '.join(notes)})")
