"""Acceptance suite: one group of tests per criterion, each with its runtime budget.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import itertools
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

import oracles
from fieldlab import control, dynamics, fock, lawcheck, observables
from fieldlab.dispersion import dispersion_table
from fieldlab.fock import FockSpace, LOWER, RAISE
from fieldlab.lattice import LatticeConfig, all_momenta, all_positions, character_vector, delta_vector, inner
from fieldlab.linalg import comm, opnorm_max
from fieldlab.oscillator import build_oscillator, equal_up_to_tau, ladder_commutator

DEFAULT = LatticeConfig(n=1, m_ir=3, m_uv=3, mass=Fraction(1), tau=2)
SMALL = LatticeConfig(n=1, m_ir=3, m_uv=1, mass=Fraction(1), tau=2)


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f} s, budget {seconds} s"


def by_name(reports):
    return {r.name: r for r in reports}


# ------------------------------------------------------------------ 1

C1 = pytest.mark.criterion(1, "oscillator exactness")


@C1
@pytest.mark.parametrize("tau", [1, 2, 3])
def test_c1_truncated_ccr(tau):
    with budget(1):
        osc = build_oscillator(tau)
        a = oracles.ladder(tau)
        want = np.eye(tau + 1) - (tau + 1) * np.diag(np.eye(tau + 1)[tau])
        assert np.abs(osc.a.dense() - a).max() == 0
        assert opnorm_max(ladder_commutator(osc).dense() - want) <= 1e-12
        r = equal_up_to_tau(ladder_commutator(osc), osc.identity(), osc, tol=1e-12)
        assert r.passed and abs(r.tau_scalar + (tau + 1)) <= 1e-12


@C1
@pytest.mark.parametrize("tau", [1, 2, 3])
def test_c1_number_commutators_exact(tau):
    with budget(1):
        osc = build_oscillator(tau)
        ulp = 4 * np.finfo(float).eps * np.sqrt(tau)
        assert opnorm_max(comm(osc.N, osc.a_dag) - osc.a_dag) <= ulp
        assert opnorm_max(comm(osc.N, osc.a) + osc.a) <= ulp


# ------------------------------------------------------------------ 2

C2 = pytest.mark.criterion(2, "lattice duality")


@C2
def test_c2_duality_default_lattice():
    cfg = DEFAULT
    with budget(1):
        ps, xs = all_momenta(cfg), all_positions(cfg)
        chis = [character_vector(p) for p in ps]
        deltas = [delta_vector(x) for x in xs]
        assert max(abs(v.norm2() - cfg.m_ir**cfg.n) for v in chis) <= 1e-12
        assert max(abs(v.norm2() - cfg.m_uv**cfg.n) for v in deltas) <= 1e-12
        dev = 0.0
        for p, chi in zip(ps, chis):
            for x, delta in zip(xs, deltas):
                want = np.exp(2j * np.pi * sum(Fraction(k, cfg.m_ir) * Fraction(j, cfg.m_uv) for k, j in zip(p.k, x.j)))
                dev = max(dev, abs(inner(delta, chi) - want))
        assert dev <= 1e-12


# ------------------------------------------------------------------ 3

C3 = pytest.mark.criterion(3, "CCR suite")


@pytest.fixture(scope="module")
def ccr_reports():
    start = time.perf_counter()
    fs = FockSpace(SMALL, "dense")
    reports = by_name(lawcheck.ccr_suite(fs, tol=1e-9))
    return reports, time.perf_counter() - start


@C3
def test_c3_runtime(ccr_reports):
    assert ccr_reports[1] < 30


@C3
def test_c3_ladder_ccr_with_corner(ccr_reports):
    r = ccr_reports[0]["[a(p), a^dag(q)] =_tau m_ir^n delta id"]
    assert r.passed, r.line()
    assert abs(r.tau_scalar - (-(SMALL.tau + 1) * SMALL.m_ir)) <= 1e-9
    assert all(abs(c + (SMALL.tau + 1) * SMALL.m_ir) <= 1e-9 for c in r.details["corner_scalars"])


@C3
def test_c3_phi_phi_vanishes_exactly(ccr_reports):
    r = ccr_reports[0]["[phi(x), phi(y)] = 0 exactly"]
    assert r.passed, r.line()


@C3
def test_c3_pi_pi_vanishes_exactly(ccr_reports):
    r = ccr_reports[0]["[pi(x), pi(y)] = 0 exactly"]
    assert r.passed, r.line()


@C3
def test_c3_phi_pi_constant_matches_single_mode_oracle(ccr_reports):
    reports = ccr_reports[0]
    r = reports["[phi(x), pi(x)] =_tau c id"]
    assert r.passed, r.line()
    want = oracles.single_mode_phi_pi_constant(SMALL.tau, 1.0) * SMALL.m_uv**SMALL.n
    assert abs(r.scalar - want) <= 1e-9
    assert reports["[phi(x), pi(y)] =_tau 0 for x != y"].passed


@C3
def test_c3_independent_corner_fit(small_dense):
    fs = small_dense
    want = oracles.single_mode_phi_pi_constant(SMALL.tau, 1.0) * SMALL.m_uv**SMALL.n
    for x in all_positions(SMALL):
        C = comm(fock.field_phi(fs, x), fock.field_pi(fs, x))
        r = fs.equal_up_to_tau_local(C, want * fs.identity(), tol=1e-9)
        assert r.passed, r.line()


# ------------------------------------------------------------------ 4

C4 = pytest.mark.criterion(4, "relativistic normalization")


@C4
def test_c4_relativistic_pairing_and_resolution():
    with budget(5):
        fs = FockSpace(DEFAULT, "sparse", n_max=3)
        reports = lawcheck.relativistic_suite(fs, tol=1e-9)
    for r in reports:
        assert r.passed, r.line()


@C4
def test_c4_rel_pairing_float_reference():
    cfg = DEFAULT
    with budget(5):
        dev = 0.0
        for p in all_momenta(cfg):
            for x in all_positions(cfg):
                got = inner(observables.rel_delta_vector(x), observables.rel_character_vector(p))
                dev = max(dev, abs(got - np.exp(2j * np.pi * float(np.dot(p.value, x.value)))))
        assert dev <= 1e-9


# ------------------------------------------------------------------ 5

C5 = pytest.mark.criterion(5, "Frobenius and complementarity")


@pytest.fixture(scope="module")
def algebras():
    start = time.perf_counter()
    algs = observables.standard_algebras(DEFAULT)
    return algs, time.perf_counter() - start


@C5
@pytest.mark.parametrize("key", ["Z", "X", "Z_rel", "X_rel"])
def test_c5_monoid_laws(algebras, key):
    with budget(10 - algebras[1]):
        alg = algebras[0][key]
        for check in (observables.check_associative, observables.check_commutative, observables.check_unit):
            r = check(alg, tol=1e-9)
            assert r.passed, r.line()


@C5
@pytest.mark.parametrize("key", ["Z", "X", "Z_rel", "X_rel"])
def test_c5_frobenius_law(algebras, key):
    with budget(10 - algebras[1]):
        r = observables.check_frobenius(algebras[0][key], tol=1e-9)
    assert r.passed, r.line()


@C5
@pytest.mark.parametrize("key, constant", [("Z", DEFAULT.m_ir**DEFAULT.n), ("X", DEFAULT.m_uv**DEFAULT.n)])
def test_c5_quasi_special_constants(algebras, key, constant):
    r = observables.check_quasi_special(algebras[0][key], tol=1e-9)
    assert r.passed, r.line()
    assert abs(r.scalar - constant) <= 1e-9


@C5
def test_c5_rel_momentum_not_quasi_special_diagonal_is_energy(algebras):
    r = observables.check_quasi_special(algebras[0]["Z_rel"], tol=1e-9)
    assert not r.passed
    diag = np.asarray(r.details["diagonal"], dtype=complex)
    E = dispersion_table(DEFAULT).energies
    assert np.abs(diag / DEFAULT.m_ir**DEFAULT.n - 2 * E).max() <= 1e-9


@C5
def test_c5_nonrel_bialgebra(algebras):
    algs = algebras[0]
    with budget(10 - algebras[1]):
        r = observables.check_strong_complementarity(algs["X"], algs["Z"], tol=1e-9, S=observables.antipode(DEFAULT))
    assert r.details["laws"]["bialgebra"]["residual"] <= 1e-9
    assert r.passed, r.line()


@C5
def test_c5_rel_pair_recorded(algebras):
    algs = algebras[0]
    r = observables.check_strong_complementarity(algs["X_rel"], algs["Z_rel"], tol=1e-9, S=observables.antipode(DEFAULT))
    assert set(r.details["laws"]) == {"bialgebra", "unit_copy", "counit_mult", "hopf"}
    assert np.isfinite(r.deviation)
    assert r.passed, r.line()


# ------------------------------------------------------------------ 6

C6 = pytest.mark.criterion(6, "gamma recovery")


@C6
def test_c6_recovery_identities():
    with budget(10):
        fs = FockSpace(SMALL, "dense")
        reports = control.recovery_checks(fs, tol=1e-9)
        assert len(reports) == 7
        for r in reports:
            assert r.passed, r.line()
        N = control.number_operator_via_gamma(fs)
        assert opnorm_max(N - control.number_operator_sites(fs)) <= 1e-9


# ------------------------------------------------------------------ 7

C7 = pytest.mark.criterion(7, "dynamics")


@C7
def test_c7_time_translation_group():
    with budget(30):
        cfg = DEFAULT
        U = {t.j: dynamics.time_translation(cfg, t) for t in dynamics.all_times(cfg)}
        dev = 0.0
        for t, s in itertools.product(dynamics.all_times(cfg), repeat=2):
            dev = max(dev, opnorm_max(U[t.j] @ U[s.j] - U[(t + s).j]))
        assert dev <= 1e-12


@C7
def test_c7_heisenberg_conjugation():
    with budget(30):
        fs = FockSpace(SMALL, "dense")
        for r in dynamics.check_heisenberg_conjugation(fs, tol=1e-9):
            assert r.passed, r.line()


@C7
def test_c7_module_unitarity_and_multiplicativity():
    with budget(30):
        reports = by_name(dynamics.check_module_laws(DEFAULT, tol=1e-9))
    assert reports["module unitarity"].passed
    assert reports["module multiplicativity"].passed


# ------------------------------------------------------------------ 8

C8 = pytest.mark.criterion(8, "propagator two-route agreement")


def _all_pairs(fs):
    cfg = fs.cfg
    origin = all_positions(cfg)[cfg.size // 2]
    t0 = dynamics.time_point(cfg, 0)
    return [dynamics.propagator_check(fs, x, t, origin, t0, tol=1e-9) for x in all_positions(cfg) for t in dynamics.all_times(cfg)]


@pytest.fixture(scope="module")
def propagator_fields():
    return {"dense": FockSpace(SMALL, "dense"), "sparse": FockSpace(DEFAULT, "sparse", n_max=3)}


@C8
@pytest.mark.parametrize("which", ["dense", "sparse"])
def test_c8_routes_agree(propagator_fields, which):
    fs = propagator_fields[which]
    cfg = fs.cfg
    with budget(60):
        reports = _all_pairs(fs)
    assert len(reports) == cfg.size * cfg.M
    for r in reports:
        assert r.details["route_gap"] <= 1e-9, r.line()
        assert r.details["residue_deviation"] <= 1e-9, r.line()
        assert r.passed
        dj, dt = r.details["dx"], r.details["dt"]
        ref = oracles.direct_propagator(cfg.n, cfg.m_ir, cfg.m_uv, float(cfg.mass), dj, dt)
        assert abs(r.details["direct"] - ref) <= 1e-9


@C8
@pytest.mark.parametrize("which", ["dense", "sparse"])
def test_c8_translation_invariance(propagator_fields, which):
    fs = propagator_fields[which]
    cfg = fs.cfg
    with budget(60):
        for j, k in [(1, 0), (0, 1), (1, 1), (-1, 2)]:
            dx, dt = dynamics._as_position(cfg, j), dynamics.time_point(cfg, k)
            direct, commutator = dynamics.check_translation_invariance(fs, dx, dt)
            assert direct.deviation == 0.0, direct.line()
            assert commutator.passed, commutator.line()


# ------------------------------------------------------------------ 9

C9 = pytest.mark.criterion(9, "derivation chain")


@pytest.fixture(scope="module")
def chain():
    start = time.perf_counter()
    fs = FockSpace(SMALL, "dense")
    reports = lawcheck.appendix_chain(fs, tol=1e-9)
    return fs, reports, time.perf_counter() - start


@C9
def test_c9_runtime(chain):
    assert chain[2] < 60


@C9
def test_c9_steps_pass(chain):
    steps = [r for r in chain[1] if r.name[0].isdigit()]
    assert len(steps) == 7
    for r in steps:
        assert r.passed, r.line()


@C9
def test_c9_continuity(chain):
    links = [r for r in chain[1] if r.name.startswith("continuity")]
    assert len(links) == 6
    for r in links:
        assert r.passed, r.line()


@C9
def test_c9_end_to_end_matches_commutator_route(chain):
    fs, reports = chain[0], chain[1]
    for r in reports:
        if r.name.startswith("end-to-end"):
            assert r.passed, r.line()
    origin = all_positions(SMALL)[SMALL.size // 2]
    t0 = dynamics.time_point(SMALL, 0)
    for x in all_positions(SMALL):
        for t in dynamics.all_times(SMALL):
            route = dynamics.propagator_check(fs, x, t, origin, t0, tol=1e-9).scalar
            for r in lawcheck.propagator_chain(fs, x, t, origin, t0, tol=1e-9):
                assert r.passed, r.line()
                assert abs(r.scalar - route) <= 1e-9


# ------------------------------------------------------------------ 10

C10 = pytest.mark.criterion(10, "backend equivalence")


@C10
def test_c10_ladder_words():
    with budget(10):
        r = lawcheck.backend_equivalence(SMALL, n_words=50, max_len=4, n_max=4, seed=0, tol=1e-12)
    assert r.passed, r.line()
    assert r.details["words"] == 50


@C10
def test_c10_operator_words_on_vacuum():
    with budget(10):
        dense = FockSpace(SMALL, "dense")
        sparse = FockSpace(SMALL, "sparse", n_max=4)
        rng = np.random.default_rng(1)
        sites = all_momenta(SMALL)
        for _ in range(50):
            word = [(sites[rng.integers(3)], (LOWER, RAISE)[rng.integers(2)]) for _ in range(rng.integers(1, 5))]
            vd, vs = fock.vacuum(dense), fock.vacuum(sparse)
            for p, kind in word:
                vd = fock.rescaled_ladder(dense, p, kind) @ vd
                vs = fock.rescaled_ladder(sparse, p, kind) @ vs
            assert np.abs(sparse.embed(vs, dense).data - vd.data).max() <= 1e-12
