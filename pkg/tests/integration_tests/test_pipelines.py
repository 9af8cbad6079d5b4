import numpy as np
import pytest

from src.akhiezer.suite import compare_table, compute_tables, prepare, verify_suite
from src.config import load_config


@pytest.fixture(scope="module")
def two_band_state(tmp_path_factory):
    out = tmp_path_factory.mktemp("two_band")
    return prepare(load_config(None, {"n_max": 6, "order": 160, "out_dir": str(out), "record_timing": False}))


@pytest.fixture(scope="module")
def three_band_state(tmp_path_factory):
    out = tmp_path_factory.mktemp("three_band")
    return prepare(load_config(None, {
        "alphas": [-0.5, 0.2], "betas": [-1.0, -0.3, 0.5, 1.0],
        "n_max": 5, "order": 160, "out_dir": str(out),
    }))


def test_default_two_band_suite_passes(two_band_state) -> None:
    report = verify_suite(two_band_state)
    failures = [(r.check_id, r.residual, r.detail) for r in report.failures()]
    assert report.passed, failures
    ids = {r.check_id for r in report.records}
    for expected in ("opoly.orthogonality", "freud.shift", "schlesinger.n3.k3", "tau.closedness.n3.k1",
                     "schlesinger.convergence.k0", "schlesinger.convergence.k3", "formulas.sheet_flip.n2",
                     "baker.jump.n3", "surface.riemann_vector", "theta.truncation", "formulas.psi1_m1.n1"):
        assert expected in ids
    assert not any(r.skipped for r in report.records)


def test_three_band_cross_pipeline(three_band_state) -> None:
    frame = compare_table(three_band_state)
    assert set(frame["quantity"]) == {"h", "a", "b", "D", "P"}
    assert (frame["status"] == "ok").all()
    assert frame["rel_dev"].max() < 1e-6


def test_uncertified_rows_are_flagged(tmp_path) -> None:
    state = prepare(load_config(None, {"n_max": 4, "order": 20, "out_dir": str(tmp_path)}))
    frame = compare_table(state)
    flagged = frame.loc[frame["status"] == "quadrature-uncertified", "n"]
    assert flagged.min() == 3


def test_compute_tables_shapes(three_band_state) -> None:
    tables = compute_tables(three_band_state)
    recurrence = tables["recurrence"]
    assert list(recurrence["n"]) == [1, 2, 3, 4, 5]
    np.testing.assert_allclose(recurrence["h_theta"], recurrence["h"], rtol=1e-6)
    residues = tables["residues"]
    assert len(residues) == 5 * 6
    assert set(residues["family"]) == {"alpha", "beta"}
    periods = tables["periods"]
    assert set(periods["quantity"]) == {"capacity", "A", "B", "lambda", "L", "u_inf"}
    assert len(periods[periods["quantity"] == "B"]) == 4
