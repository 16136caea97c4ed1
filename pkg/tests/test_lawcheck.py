import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fieldlab import lawcheck
from fieldlab.errors import ConfigError
from fieldlab.fock import FockSpace
from fieldlab.lattice import LatticeConfig
from fieldlab.report import FIELDS, CheckReport, dumps

SMALL = LatticeConfig(m_uv=1)
DEFAULT = LatticeConfig()
EXACT_REDS = {"[phi(x), phi(y)] = 0 exactly", "[pi(x), pi(y)] = 0 exactly"}


@pytest.fixture(scope="module")
def default_reports():
    return lawcheck.run_all(DEFAULT)


@pytest.fixture(scope="module")
def small_reports():
    return lawcheck.run_all(SMALL)


def failing(reports):
    return {r.name for r in reports if not lawcheck.outcome_ok(r)}


@given(st.booleans(), st.sampled_from([None, "fail"]), st.booleans())
def test_outcome_ok(passed, expect, skipped):
    r = CheckReport("x", "a", 0.0 if passed else 1.0, 0.5, passed)
    if expect:
        r.details["expect"] = expect
    if skipped:
        r.details["skipped"] = "why"
        assert not lawcheck.outcome_ok(r)
    else:
        assert lawcheck.outcome_ok(r) == (passed != (expect == "fail"))


def test_small_lattice_only_exact_field_commutators_fail(small_reports):
    assert failing(small_reports) == EXACT_REDS
    assert not lawcheck.structural(small_reports)


def test_default_lattice_failures(default_reports):
    assert failing(default_reports) == EXACT_REDS | {"orthogonal[rel-position]", "frobenius[rel-position]"}
    qs = next(r for r in default_reports if r.name == "quasi_special[rel-position]")
    assert not qs.passed and qs.details["expect"] == "fail"


def test_report_configs_record_the_lattice(default_reports):
    Ms = {r.config["M"] for r in default_reports if r.config}
    assert Ms == {3, 9}
    assert {r.backend for r in default_reports if r.backend} >= {"sparse", "dense"}


def test_massless_lattice_is_structural():
    reports = lawcheck.run_all(DEFAULT.with_(mass=0))
    assert lawcheck.structural(reports)
    skipped = [r for r in reports if r.is_skipped]
    assert len(skipped) == 7
    assert not lawcheck.all_ok(reports)


def test_report_json_is_deterministic(small_reports):
    text = dumps(small_reports)
    assert text == dumps(lawcheck.run_all(SMALL))
    rows = json.loads(text)
    assert all(set(FIELDS) <= set(row) for row in rows)


def test_appendix_chain_on_small_lattice(small_dense):
    reports = lawcheck.appendix_chain(small_dense)
    assert len(reports) == 16
    for r in reports:
        assert r.passed, r.line()
    step2 = next(r for r in reports if r.name.startswith("2 "))
    assert step2.tau_scalar == pytest.approx(-(SMALL.tau + 1))


def test_appendix_chain_needs_dense(default_sparse):
    with pytest.raises(ConfigError, match="dense"):
        lawcheck.appendix_chain(default_sparse)


def test_continuity_detects_a_break(small_dense):
    fs = small_dense
    I = fs.identity()
    chain = lawcheck.DerivationChain(fs, 1)
    chain.steps = [
        lawcheck.Step("a", "x", I, I, lawcheck.EXACT),
        lawcheck.Step("b", "x", 2 * I, 2 * I, lawcheck.EXACT),
    ]
    reports = chain.evaluate(1e-9)
    assert [r.passed for r in reports] == [True, True, False]


@given(st.integers(0, 2), st.integers(0, 2))
def test_propagator_chain(small_dense, x, t):
    for r in lawcheck.propagator_chain(small_dense, x - 1, t, 0, 0):
        assert r.passed, r.line()


@pytest.mark.parametrize("seed", [0, 7])
def test_backend_equivalence(seed):
    r = lawcheck.backend_equivalence(SMALL, seed=seed)
    assert r.passed, r.line()
    assert r.details["seed"] == seed


def test_suites_on_five_site_lattice():
    cfg = LatticeConfig(m_ir=5, m_uv=1, mass="4/5", tau=1)
    fs = FockSpace(cfg, "dense")
    for suite in (lawcheck.ccr_suite(fs), lawcheck.control_suite(fs), lawcheck.relativistic_suite(fs)):
        bad = [r.name for r in suite if not r.passed and r.name not in EXACT_REDS]
        assert not bad


def test_default_backend():
    assert lawcheck.default_backend(SMALL) == "dense"
    assert lawcheck.default_backend(DEFAULT, max_dim=1000) == "sparse"


def test_measurement_reports_carry_levels(default_reports):
    r = next(r for r in default_reports if r.name == "degeneracy histogram")
    assert r.details["levels"] == {"1": 5, "4/3": 2, "5/3": 2}
    assert np.isfinite(r.deviation)
