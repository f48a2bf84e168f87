from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from lazyac import fuzz  # noqa: E402
from lazyac.syntax import parse_term  # noqa: E402
from lazyac.terms import App, Signature, Var, flatten  # noqa: E402

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


def make_signature() -> Signature:
    sig = fuzz.default_signature()
    for name in ("e", "u1", "u2", "u3", "u4"):
        sig.free(name, 0)
    sig.free("h", 3)
    return sig


@pytest.fixture
def sig() -> Signature:
    return make_signature()


@pytest.fixture
def T(sig):
    """Parse a term over the shared test signature, declaring unknown symbols."""
    return lambda text: parse_term(text, sig, declare=True)


def raw_terms(sig: Signature, with_vars: bool = True, max_leaves: int = 12):
    """Hypothesis strategy for possibly non-flat terms over ``sig``."""
    leaves = [App(sig[c]) for c in ("a", "b", "c", "d")]
    leaf = st.sampled_from(leaves)
    if with_vars:
        leaf = leaf | st.sampled_from([Var(x) for x in ("X", "Y", "Z")])

    def extend(children):
        ac = st.tuples(st.sampled_from([sig["+"], sig["*"]]), st.lists(children, min_size=2, max_size=4)).map(
            lambda p: App(p[0], tuple(p[1]))
        )
        g = children.map(lambda c: App(sig["g"], (c,)))
        f = st.tuples(children, children).map(lambda p: App(sig["f"], p))
        return ac | g | f

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def flat_terms(sig: Signature, with_vars: bool = True, max_leaves: int = 12):
    return raw_terms(sig, with_vars, max_leaves).map(flatten)


# -- acceptance report ----------------------------------------------------------

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")
    config.addinivalue_line("markers", "run_last: run after every other test in the session")


def pytest_collection_modifyitems(config, items):
    items.sort(key=lambda item: item.get_closest_marker("run_last") is not None)


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "ran": False, "notes": []})
    if call.when == "call" or call.excinfo is not None:
        entry["ran"] = True
        if call.excinfo is not None:
            entry["ok"] = False
    for note in getattr(item, "criterion_notes", []):
        if note not in entry["notes"]:
            entry["notes"].append(note)


@pytest.fixture
def note(request):
    """Attach an informational line to this test's acceptance criterion."""
    notes = []
    request.node.criterion_notes = notes
    return notes.append


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["ok"] and entry["ran"] else ("FAIL" if entry["ran"] else "NOT RUN")
        terminalreporter.write_line(f"criterion {number}: {status}  {entry['title']}")
        for n in entry["notes"]:
            terminalreporter.write_line(f"    {n}")
