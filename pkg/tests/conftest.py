import numpy as np
import pandas as pd
import pytest

from annokit import model

_acceptance_results = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and report.when == "call":
        _acceptance_results.append((marker.args[0], report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, outcome in _acceptance_results:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[ACCEPTANCE] {status}: {criterion}")


def make_frame(columns: dict) -> pd.DataFrame:
    """Annotation frame from {column: {sample_id: value}} plus implied ids."""
    ids = []
    for cells in columns.values():
        for sid in cells:
            if sid not in ids:
                ids.append(sid)
    ids = sorted(ids)
    data = {model.SAMPLE_ID: ids}
    for col, cells in columns.items():
        data[col] = [cells.get(sid) for sid in ids]
    return pd.DataFrame(data, dtype=object)


def synthetic_pool(
    seed: int,
    n_annotators: int = 6,
    n_samples: int = 240,
    n_classes: int = 3,
    flip_probs=None,
    coverage: int = 2,
    re_rows: int = 12,
):
    """Planted-label pool: each sample gets `coverage` annotators; each
    annotator flips the planted label with their own probability. Returns
    (frame, planted, names)."""
    rng = np.random.default_rng(seed)
    names = [f"a{i + 1}" for i in range(n_annotators)]
    if flip_probs is None:
        flip_probs = [0.1] * n_annotators
    planted = rng.integers(0, n_classes, size=n_samples)

    def observed(annotator_idx, sample_idx):
        label = planted[sample_idx]
        if rng.random() < flip_probs[annotator_idx]:
            label = (label + 1 + rng.integers(0, n_classes - 1)) % n_classes
        return str(label)

    cells = {name: {} for name in names}
    re_cells = {name: {} for name in names}
    for s in range(n_samples):
        # ring block structure so every adjacent pair shares samples
        first = s % n_annotators
        chosen = [(first + k) % n_annotators for k in range(coverage)]
        for a in chosen:
            cells[names[a]][f"s{s:05d}"] = observed(a, s)
    for a, name in enumerate(names):
        own = sorted(cells[name])
        for sid in own[:re_rows]:
            idx = int(sid[1:])
            re_cells[name][sid] = observed(a, idx)

    columns = {}
    for name in names:
        columns[name] = cells[name]
    for name in names:
        if re_cells[name]:
            columns[model.RE_PREFIX + name] = re_cells[name]
    return make_frame(columns), planted, names


@pytest.fixture
def two_rater_fixture():
    """The canonical a=[0,0,1,1] / b=[0,1,1,1] pair."""
    return ["0", "0", "1", "1"], ["0", "1", "1", "1"]
