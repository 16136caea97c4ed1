"""Verification harness.

Replays the graphical derivation of the Heisenberg-picture commutator as a
chain of concrete operator identities, evaluates the propagator three ways,
and collects every module-level law check into one ordered report list.

Chain operators act on ``F ⊗ C`` with control ``C = V ⊗ T`` (momentum wire
and time wire).  From step 3 on, the field factor is the identity and the
chain is carried on control-space operators ``R`` with ``S = id_F ⊗ R``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import control, dynamics, fock, observables
from .dispersion import dispersion_table
from .errors import ConfigError, ZeroEnergyModeError
from .fock import DENSE_CAP, FockSpace, LOWER, RAISE
from .lattice import (
    LatticeConfig,
    all_momenta,
    all_positions,
    carrier_space,
    character,
    character_vector,
    delta_vector,
    inner,
)
from .linalg import LinOp, StateVec, comm, dagger, identity, ket, opnorm_max, swap, tensor, tensor_space
from .oscillator import build_oscillator, equal_up_to_tau, ladder_commutator
from .report import CheckReport

__all__ = [
    "Step",
    "DerivationChain",
    "appendix_chain",
    "propagator_chain",
    "lattice_suite",
    "oscillator_suite",
    "dispersion_suite",
    "ccr_suite",
    "fock_suite",
    "relativistic_suite",
    "observables_suite",
    "control_suite",
    "dynamics_suite",
    "propagator_suite",
    "backend_equivalence",
    "run_all",
    "outcome_ok",
    "all_ok",
    "default_backend",
]

ANCHOR = "derivation"
EXACT, UP_TO_TAU, UP_TO_SCALAR = "exact", "up-to-tau", "up-to-scalar"


def outcome_ok(r: CheckReport) -> bool:
    """A report is fine if it passed, or failed where failure is the expected outcome."""
    if r.is_skipped:
        return False
    return (not r.passed) if r.details.get("expect") == "fail" else r.passed


def all_ok(reports) -> bool:
    return all(outcome_ok(r) for r in reports)


# ---------------------------------------------------------------- chain


@dataclass
class Step:
    name: str
    anchor: str
    left: LinOp
    right: LinOp
    kind: str
    lifted: bool = False
    corner_basis: LinOp | None = None


@dataclass
class DerivationChain:
    """Ordered steps; step ``i``'s right operand is step ``i + 1``'s left operand.

    Steps marked ``lifted`` hold control-space operators ``R`` standing for
    ``id_F ⊗ R``.
    """

    fs: FockSpace
    ctrl_dim: int
    steps: list = field(default_factory=list)
    end_to_end: list = field(default_factory=list)

    def _full(self, step, op):
        return tensor(self.fs.identity(), op.as_sparse()) if step.lifted else op

    def continuity(self, tol: float) -> list:
        out = []
        for a, b in zip(self.steps, self.steps[1:]):
            if a.right is b.left:
                dev = 0.0
            else:
                dev = opnorm_max(self._full(a, a.right).sparse() - self._full(b, b.left).sparse())
            out.append(CheckReport.of(f"continuity {a.name} -> {b.name}", f"{ANCHOR}/continuity", dev, tol))
        return out

    def evaluate(self, tol: float | None = None) -> list:
        tol = self.fs.cfg.tol if tol is None else tol
        reports = []
        for s in self.steps:
            shapes = {"left": list(s.left.shape), "right": list(s.right.shape), "lifted": s.lifted}
            if s.kind == UP_TO_TAU:
                r = self.fs.equal_up_to_tau_local(
                    s.left, s.right, ctrl=(self.ctrl_dim, self.ctrl_dim), tol=tol, name=s.name, corner_basis=s.corner_basis
                )
                r.anchor = s.anchor
                r.details.update(shapes, kind=s.kind)
            else:
                dev = opnorm_max(s.left.sparse() - s.right.sparse())
                r = CheckReport.of(s.name, s.anchor, dev, tol, details={**shapes, "kind": s.kind})
            r.backend, r.config = self.fs.backend, self.fs.snapshot()
            reports.append(r)
        for r in self.continuity(tol):
            r.backend, r.config = self.fs.backend, self.fs.snapshot()
            reports.append(r)
        return reports + self.end_to_end


def _require_dense(fs):
    if fs.backend != "dense":
        raise ConfigError("the derivation chain needs the dense backend to witness top-level corners")


def _kgamma(fs, create: LinOp, destroy: LinOp, C):
    """Open-wire commutator ``destroy ∘ create - (create ⊗ id)(id ⊗ swap)(destroy ⊗ id)``."""
    IC = identity(C)
    term1 = destroy @ create
    term2 = tensor(create, IC) @ tensor(fs.identity(), swap(C, C)) @ tensor(destroy, IC)
    return term1 - term2


def _z_basis(cfg):
    """Copying bases of the momentum algebra on ``V`` and on ``C = V ⊗ T``."""
    BV = np.column_stack([character_vector(p).data for p in all_momenta(cfg)])
    BT = np.column_stack([character_vector(k).data for k in all_momenta(dynamics.time_config(cfg))])
    return BV, np.kron(BV, BT)


def _cup(alg) -> LinOp:
    return observables.cup(alg)


def _cup_tensor(V, T, cupV, cupT) -> LinOp:
    """Cup on ``V ⊗ T`` from cups on each wire, reordered to ``(V ⊗ T) ⊗ (V ⊗ T)``."""
    IV, IT = identity(V, sparse=False), identity(T, sparse=False)
    return tensor(IV, swap(V, T), IT) @ tensor(cupV, cupT)


def appendix_chain(fs: FockSpace, tol: float | None = None) -> list:
    """Seven-step derivation of ``[phi^+(x, t), phi^-(y, s)]``, evaluated.

    1. Heisenberg operator: ``K_bar = (id ⊗ U^dag) K (id ⊗ U)`` exactly,
       ``K`` the open-wire commutator of ``gamma``.
    2. Commutator of ``gamma``: ``K =_tau id``, so ``S_1 =_tau id_F ⊗ U^dag U``;
       the corner is fitted against ``sum_p |tau><tau|_p ⊗ U^dag Pi_p U``.
    3. Snake for ``Z``: ``U^dag`` rewritten as the bent conjugate of ``U``.
    4. Unitarity: ``U^dag = (U ⊗ id_T)(id_V ⊗ (S ⊗ id) cup_X)``.
    5. Multiplicativity: pull the second ``U`` through ``mult_Z`` on time.
    6. Antipode: ``(S ⊗ id) cup_X = cup_Z`` on the time wire.
    7. Diagonalisation: ``sum_p Pi_p ⊗ |eps_{-E_p}><eps_{-E_p}|``.
    """
    _require_dense(fs)
    cfg = fs.cfg
    tol = cfg.tol if tol is None else tol
    V, T = carrier_space(cfg), dynamics.time_space(cfg)
    C = tensor_space(V, T)
    IF, IV, IT = fs.identity(), identity(V, sparse=False), identity(T, sparse=False)
    U = dynamics.coherent_module(cfg)
    Ud = dagger(U)

    gbar_d = dynamics.heisenberg_gamma_dagger(fs).op
    gbar = dynamics.heisenberg_gamma(fs).op
    gd, g = control._gammas(fs)

    S0 = _kgamma(fs, gbar_d, gbar, C)
    Kg = _kgamma(fs, gd.op, g.op, V)
    S1 = tensor(IF, Ud.as_sparse()) @ Kg @ tensor(IF, U.as_sparse())
    R2 = Ud @ U
    S2 = tensor(IF, R2.as_sparse())

    c = control._measure(fs)
    corner = None
    for i, p in enumerate(fs.sites):
        chi = observables.rel_character_vector(p)
        Pi = c[i] * (ket(chi) @ dagger(ket(chi)))
        term = tensor(fs.top_projector(p), (Ud @ Pi @ U).as_sparse())
        corner = term if corner is None else corner + term

    BV, BC = _z_basis(cfg)
    Uhat = np.linalg.solve(BV, U.dense() @ BC)
    Ustar = LinOp(BV @ np.conj(Uhat) @ np.linalg.inv(BC), C, V)
    Zv = observables.momentum_algebra(cfg)
    Zt, Xt = observables.momentum_algebra(dynamics.time_config(cfg)), observables.position_algebra(dynamics.time_config(cfg))
    cupC = _cup_tensor(V, T, _cup(Zv), _cup(Zt))
    capV = observables.cap(Zv)
    IC = identity(C, sparse=False)
    bent = tensor(IC, capV) @ tensor(IC, Ustar, IV) @ tensor(cupC, IV)
    R3 = bent @ U

    S_T = observables.antipode(dynamics.time_config(cfg))
    anti_cupX = tensor(S_T, IT) @ _cup(Xt)
    Utilde = tensor(U, IT) @ tensor(IV, anti_cupX)
    R4 = Utilde @ U

    R5 = tensor(U, IT) @ tensor(IV, Zt.mult, IT) @ tensor(IV, IT, anti_cupX)
    R6 = tensor(U, IT) @ tensor(IV, Zt.mult, IT) @ tensor(IV, IT, _cup(Zt))

    R7 = None
    units = fs.dispersion.units
    for i, p in enumerate(fs.sites):
        chi = observables.rel_character_vector(p)
        eps = dynamics.energy_state(cfg, -units[i])
        term = tensor(c[i] * (ket(chi) @ dagger(ket(chi))), ket(eps) @ dagger(ket(eps)))
        R7 = term if R7 is None else R7 + term

    a = "derivation/"
    chain = DerivationChain(fs, C.dim)
    chain.steps = [
        Step("1 heisenberg operator", a + "heisenberg-operator", S0, S1, EXACT),
        Step("2 gamma commutator", a + "gamma-commutator", S1, S2, UP_TO_TAU, corner_basis=corner),
        Step("3 snake for Z", a + "snake", R2, R3, EXACT, lifted=True),
        Step("4 module unitarity", a + "module-unitarity", R3, R4, EXACT, lifted=True),
        Step("5 module multiplicativity", a + "module-multiplicativity", R4, R5, EXACT, lifted=True),
        Step("6 antipode", a + "antipode", R5, R6, EXACT, lifted=True),
        Step("7 diagonalised module", a + "diagonalisation", R6, R7, EXACT, lifted=True),
    ]

    gap = opnorm_max(anti_cupX.dense() - _cup(Zt).dense())
    chain.end_to_end.append(
        CheckReport.of("antipode turns cup_X into cup_Z", a + "antipode", gap, tol, backend=fs.backend, config=fs.snapshot())
    )
    chain.end_to_end.extend(_end_to_end(fs, S0, R7, C, tol))
    reports = chain.evaluate(tol)
    step2 = reports[1]
    want = -(cfg.tau + 1)
    step2.details["expected_tau_scalar"] = want
    if step2.tau_scalar is not None:
        step2.deviation = max(step2.deviation, step2.details.get("corner_fit_residual", 0.0))
        step2.passed = step2.deviation <= step2.tol and abs(step2.tau_scalar - want) <= tol
    return reports


def _control_state(cfg, x, t):
    v = observables.rel_delta_vector(x)
    w = dynamics.time_state(t)
    return StateVec(tensor_space(v.space, w.space), np.kron(v.data, w.data))


def _end_to_end(fs, S0, R7, C, tol):
    """``<c1| R7 |c2>`` against the vacuum entry of the sandwiched ``S0`` and the direct sum."""
    cfg = fs.cfg
    IF = fs.identity()
    y0, s0 = all_positions(cfg)[cfg.size // 2], dynamics.time_point(cfg, 0)
    c2 = _control_state(cfg, y0, s0)
    dev_r7 = dev_s0 = 0.0
    for x in all_positions(cfg):
        for t in dynamics.all_times(cfg):
            c1 = _control_state(cfg, x, t)
            d = dynamics.propagator_direct(cfg, x - y0, t - s0)
            r7 = complex(np.vdot(c1.data * c1.space.gram, (R7 @ c2).data))
            sandwich = tensor(IF, dagger(ket(c1)).as_sparse()) @ S0 @ tensor(IF, ket(c2).as_sparse())
            dev_r7 = max(dev_r7, abs(r7 - d))
            dev_s0 = max(dev_s0, abs(sandwich.entry(0, 0) - d))
    kw = dict(backend=fs.backend, config=fs.snapshot())
    return [
        CheckReport.of("end-to-end: diagonalised module vs propagator", f"{ANCHOR}/end-to-end", dev_r7, tol, **kw),
        CheckReport.of("end-to-end: heisenberg commutator vs propagator", f"{ANCHOR}/end-to-end", dev_s0, tol, **kw),
    ]


def propagator_chain(fs: FockSpace, x, tx, y, ty, tol: float | None = None) -> list:
    """Three equalities from the commutator to the lattice sum.

    (i) commutator scalar = ``sum_p c_p <delta^rel_{x-y} | U(chi_p^rel ⊗ |ty - tx>)>``;
    (ii) = ``sum_p c_p exp(2 pi i E_p (ty - tx)) <delta^rel_{x-y} | chi_p^rel>``;
    (iii) = ``sum_p c_p exp(-2 pi i p.(x - y))``.
    """
    cfg = fs.cfg
    tol = cfg.tol if tol is None else tol
    x, y = dynamics._as_position(cfg, x), dynamics._as_position(cfg, y)
    tx, ty = dynamics._as_time(cfg, tx), dynamics._as_time(cfg, ty)
    lam = comm(dynamics.field_heisenberg(fs, x, tx, "plus"), dynamics.field_heisenberg(fs, y, ty, "minus")).entry(0, 0)
    U = dynamics.coherent_module(cfg)
    dl = observables.rel_delta_vector(x - y)
    w = dynamics.time_state(ty - tx)
    c = control._measure(fs)
    units = fs.dispersion.units
    sandwich = phased = 0j
    for i, p in enumerate(fs.sites):
        chi = observables.rel_character_vector(p)
        moved = U @ StateVec(U.dom, np.kron(chi.data, w.data))
        sandwich += c[i] * inner(dl, moved)
        ph = complex(np.exp(2j * np.pi * units[i] * (ty - tx).j[0] / cfg.M))
        phased += c[i] * ph * inner(dl, chi)
    direct = dynamics.propagator_direct(cfg, x - y, tx - ty)
    kw = dict(backend=fs.backend, config=fs.snapshot(), details={"x": x.j, "tx": tx.j[0], "y": y.j, "ty": ty.j[0]})
    return [
        CheckReport.of("propagator (i) commutator = module sandwich", "derivation/propagator", abs(lam - sandwich), tol, scalar=lam, **kw),
        CheckReport.of("propagator (ii) module phases extracted", "derivation/propagator", abs(sandwich - phased), tol, scalar=sandwich, **kw),
        CheckReport.of("propagator (iii) lattice sum", "derivation/propagator", abs(phased - direct), tol, scalar=direct, **kw),
    ]


# ---------------------------------------------------------------- suites


def lattice_suite(cfg: LatticeConfig, tol: float = 1e-12) -> list:
    ps, xs = all_momenta(cfg), all_positions(cfg)
    chis = [character_vector(p) for p in ps]
    deltas = [delta_vector(x) for x in xs]
    norm_chi = max(abs(v.norm2() - cfg.m_ir**cfg.n) for v in chis)
    norm_delta = max(abs(v.norm2() - cfg.m_uv**cfg.n) for v in deltas)
    pair = max(abs(inner(deltas[j], chis[i]) - character(p, x)) for i, p in enumerate(ps) for j, x in enumerate(xs))
    exact = max(abs(character(p, x) - np.exp(2j * np.pi * float(np.dot(p.value, x.value)))) for p in ps for x in xs)
    ortho = max((abs(inner(chis[i], chis[j])) for i in range(len(ps)) for j in range(len(ps)) if i != j), default=0.0)
    snap = cfg.snapshot()
    a = "lattice/duality"
    return [
        CheckReport.of("<chi_p, chi_p> = m_ir^n", a, norm_chi, tol, config=snap),
        CheckReport.of("<delta_x, delta_x> = m_uv^n", a, norm_delta, tol, config=snap),
        CheckReport.of("<delta_x, chi_p> = exp(2 pi i p.x)", a, pair, tol, config=snap),
        CheckReport.of("<chi_p, chi_q> = 0 for p != q", a, ortho, tol, config=snap),
        CheckReport.of("character table vs floating exp", a, exact, tol, config=snap),
    ]


def oscillator_suite(taus, tol: float = 1e-12) -> list:
    out = []
    for tau in taus:
        osc = build_oscillator(tau)
        top = osc.top_projector()
        I = osc.identity()
        dev = opnorm_max(ladder_commutator(osc) - (I - (tau + 1) * top))
        out.append(CheckReport.of(f"[a, a^dag] = id - (tau+1)|tau><tau| (tau={tau})", "truncated-oscillator/ladder", dev, tol))
        dev = opnorm_max(comm(osc.N, osc.a_dag) - osc.a_dag)
        out.append(CheckReport.of(f"[N, a^dag] = a^dag (tau={tau})", "truncated-oscillator/number", dev, tol))
        dev = opnorm_max(comm(osc.N, osc.a) + osc.a)
        out.append(CheckReport.of(f"[N, a] = -a (tau={tau})", "truncated-oscillator/number", dev, tol))
        r = equal_up_to_tau(ladder_commutator(osc), I, osc, tol=tol, name=f"[a, a^dag] =_tau id (tau={tau})")
        if r.tau_scalar is None or abs(r.tau_scalar + (tau + 1)) > tol:
            r.passed = False
        out.append(r)
    return out


def dispersion_suite(cfg: LatticeConfig) -> list:
    d = dispersion_table(cfg)
    snap = cfg.snapshot()
    sym = max(abs(d.energy(p) - d.energy(-p)) for p in all_momenta(cfg))
    zero = abs(d.energy(all_momenta(cfg)[cfg.size // 2]) - cfg.mass)
    floor_ok = all(
        d.energy(p) <= d.unquantised(p) + 1e-12 and d.unquantised(p) - float(d.energy(p)) < 1 / cfg.m_ir
        for p in all_momenta(cfg)
    )
    levels = d.levels()
    return [
        CheckReport.of("E_(-p) = E_p", "dynamics/dispersion", float(sym), 0.0, config=snap),
        CheckReport.of("E_0 = m", "dynamics/dispersion", float(zero), 0.0, config=snap),
        CheckReport.of("floor within one grid step", "dynamics/dispersion", 0.0 if floor_ok else np.inf, 0.0, config=snap),
        dynamics.check_periodicity(cfg),
        CheckReport.of(
            "degeneracy histogram",
            "dynamics/degeneracy",
            0.0,
            0.0,
            config=snap,
            details={"levels": {str(k): v for k, v in levels.items()}, "measurement": True},
        ),
    ]


def _mask_max(A: LinOp, fs: FockSpace) -> float:
    return control._max_on(A, fs.valid_columns(A))


def ccr_suite(fs: FockSpace, tol: float | None = None) -> list:
    """Equal-time commutators of the ladder and field operators."""
    cfg = fs.cfg
    tol = cfg.tol if tol is None else tol
    vol = cfg.m_ir**cfg.n
    I = fs.identity()
    kw = dict(backend=fs.backend, config=fs.snapshot())
    a = "field/ccr"

    lad = aa = 0.0
    corners = []
    for i, p in enumerate(fs.sites):
        ap = fock.rescaled_ladder(fs, p, LOWER)
        for j, q in enumerate(fs.sites):
            C = comm(ap, fock.rescaled_ladder(fs, q, RAISE))
            aa = max(aa, _mask_max(comm(ap, fock.rescaled_ladder(fs, q, LOWER)), fs))
            if i != j:
                lad = max(lad, _mask_max(C, fs))
                continue
            r = fs.equal_up_to_tau(C, vol * I, [p], tol=tol)
            lad = max(lad, r.deviation)
            corners.append(r.tau_scalar)
    want = -(cfg.tau + 1) * vol
    ok_corners = [c for c in corners if c is not None]
    corner_dev = max((abs(c - want) for c in ok_corners), default=0.0)
    if fs.backend == "dense" and len(ok_corners) < len(corners):
        corner_dev = np.inf
    out = [
        CheckReport.of(
            "[a(p), a^dag(q)] =_tau m_ir^n delta id",
            a,
            max(lad, corner_dev),
            tol,
            scalar=vol,
            tau_scalar=ok_corners[0] if ok_corners else None,
            details={"expected_tau_scalar": want, "corner_scalars": corners},
            **kw,
        ),
        CheckReport.of("[a(p), a(q)] = 0", a, aa, tol, **kw),
    ]

    xs = all_positions(cfg)
    phis = [fock.field_phi(fs, x) for x in xs]
    pis = [fock.field_pi(fs, x) for x in xs]
    exact = {"phi": 0.0, "pi": 0.0}
    local = {"phi": 0.0, "pi": 0.0}
    phipi_off = 0.0
    consts = []
    phipi_diag = 0.0
    zero = 0.0 * I
    for i in range(len(xs)):
        for j in range(len(xs)):
            for label, ops in (("phi", phis), ("pi", pis)):
                C = comm(ops[i], ops[j])
                exact[label] = max(exact[label], _mask_max(C, fs))
                local[label] = max(local[label], fs.equal_up_to_tau_local(C, zero, tol=tol).deviation)
            C = comm(phis[i], pis[j])
            if i == j:
                c = C.entry(0, 0)
                consts.append(c)
                phipi_diag = max(phipi_diag, fs.equal_up_to_tau_local(C, c * I, tol=tol).deviation)
            else:
                phipi_off = max(phipi_off, fs.equal_up_to_tau_local(C, zero, tol=tol).deviation)
    spread = float(np.max(np.abs(np.array(consts) - consts[0])))
    out += [
        CheckReport.of("[phi(x), phi(y)] = 0 exactly", a, exact["phi"], tol, **kw),
        CheckReport.of("[pi(x), pi(y)] = 0 exactly", a, exact["pi"], tol, **kw),
        CheckReport.of("[phi(x), phi(y)] =_tau 0", a, local["phi"], tol, **kw),
        CheckReport.of("[pi(x), pi(y)] =_tau 0", a, local["pi"], tol, **kw),
        CheckReport.of(
            "[phi(x), pi(x)] =_tau c id",
            a,
            max(phipi_diag, spread),
            tol,
            scalar=consts[0],
            details={"expected_constant": 1j * cfg.m_uv**cfg.n / np.sqrt(2)},
            **kw,
        ),
        CheckReport.of("[phi(x), pi(y)] =_tau 0 for x != y", a, phipi_off, tol, **kw),
    ]
    return out


def fock_suite(fs: FockSpace, tol: float | None = None) -> list:
    """Number operator, Hamiltonian, self-adjointness and the one-particle states."""
    cfg = fs.cfg
    tol = cfg.tol if tol is None else tol
    kw = dict(backend=fs.backend, config=fs.snapshot())
    a = "field/fock"
    N, H = fock.number_operator(fs), fock.hamiltonian(fs)
    out = [
        CheckReport.of("N = sum_p m_ir^-n a^dag(p) a(p)", a, opnorm_max(N - fock.number_operator_sum(fs)), tol, **kw),
        CheckReport.of("H = sum_p m_ir^-n E_p a^dag(p) a(p)", a, opnorm_max(H - fock.hamiltonian_sum(fs)), tol, **kw),
        CheckReport.of("[N, H] = 0", a, opnorm_max(comm(N, H)), tol, **kw),
    ]
    v0 = fock.vacuum(fs)
    vac = max(float(np.abs((N @ v0).data).max()), float(np.abs((H @ v0).data).max()))
    out.append(CheckReport.of("N|0> = H|0> = 0", a, vac, tol, **kw))
    herm = 0.0
    for x in all_positions(cfg):
        herm = max(herm, _mask_max(dagger(fock.field_phi(fs, x)) - fock.field_phi(fs, x), fs))
        herm = max(herm, _mask_max(dagger(fock.field_pi(fs, x)) - fock.field_pi(fs, x), fs))
    out.append(CheckReport.of("phi and pi self-adjoint", a, herm, tol, **kw))
    return out


def relativistic_suite(fs: FockSpace, tol: float | None = None) -> list:
    cfg = fs.cfg
    tol = cfg.tol if tol is None else tol
    kw = dict(backend=fs.backend, config=fs.snapshot())
    a = "field/relativistic"
    ps, xs = all_momenta(cfg), all_positions(cfg)
    pair = max(
        abs(inner(observables.rel_delta_vector(x), observables.rel_character_vector(p)) - character(p, x)) for p in ps for x in xs
    )
    d = fs.dispersion
    vol = cfg.m_ir**cfg.n
    one = np.flatnonzero(fs.totals == 1)
    norm_dev = leak = 0.0
    acc = np.zeros((one.size, one.size), dtype=complex)
    for p in ps:
        k = fock.one_particle_rel(fs, p)
        E = float(d.energy(p))
        norm_dev = max(norm_dev, abs(k.norm2() - 2 * E * vol))
        outside = np.delete(k.data, one)
        leak = max(leak, float(np.abs(outside).max()) if outside.size else 0.0)
        acc += (1 / vol / (2 * E)) * np.outer(k.data[one], np.conj(k.data[one]))
    res_dev = max(float(np.abs(acc - np.eye(one.size)).max()), leak)
    return [
        CheckReport.of("<delta_x^rel | chi_p^rel> = exp(2 pi i p.x)", a, pair, tol, **kw),
        CheckReport.of("<p|p> = 2 E_p m_ir^n", a, norm_dev, tol, **kw),
        CheckReport.of("one-particle resolution of identity", a, res_dev, tol, **kw),
    ]


def observables_suite(cfg: LatticeConfig, tol: float = 1e-9) -> list:
    out = []
    algs = observables.standard_algebras(cfg)
    for alg in algs.values():
        if not alg.orthogonal:
            B = alg.basis
            G = B.conj().T @ (alg.space.gram[:, None] * B)
            off = float(np.abs(G - np.diag(np.diagonal(G))).max())
            out.append(
                CheckReport.of(f"orthogonal[{alg.tag}]", "observables/orthogonality", off, tol, details={"algebra": alg.tag})
            )
        for check in (
            observables.check_associative,
            observables.check_unit,
            observables.check_commutative,
            observables.check_frobenius,
            observables.check_quasi_special,
        ):
            out.append(check(alg, tol))
    d = dispersion_table(cfg)
    graded = len(set(d.units.tolist())) > 1
    extra = []
    for r in out:
        if r.name in ("quasi_special[rel-momentum]", "quasi_special[rel-position]") and graded:
            r.details["expect"] = "fail"
        if r.name == "quasi_special[rel-momentum]":
            diag = np.asarray(r.details["diagonal"], dtype=complex)
            want = 2 * d.energies * cfg.m_ir**cfg.n
            extra.append(
                CheckReport.of(
                    "quasi_special diagonal = 2 E_p m_ir^n",
                    "observables/quasi-special",
                    float(np.abs(diag - want).max()),
                    tol,
                    details={"diagonal": diag.real.tolist()},
                )
            )
    out += extra
    S = observables.antipode(cfg)
    out.append(observables.check_strong_complementarity(algs["X"], algs["Z"], tol, S=S))
    out.append(observables.check_strong_complementarity(algs["X_rel"], algs["Z_rel"], tol, S=S))
    I = identity(S.dom, sparse=False)
    out.append(CheckReport.of("antipode^2 = id", "observables/antipode", opnorm_max((S @ S).dense() - I.dense()), tol))
    dev = max(
        opnorm_max((S @ character_vector(p)).data - character_vector(-p).data) for p in all_momenta(cfg)
    )
    out.append(CheckReport.of("antipode chi_p = chi_(-p)", "observables/antipode", dev, tol))
    for r in out:
        r.config = r.config or cfg.snapshot()
    return out


def control_suite(fs: FockSpace, tol: float | None = None) -> list:
    tol = fs.cfg.tol if tol is None else tol
    out = control.recovery_checks(fs, tol)
    out.append(control.gamma_commutator_check(fs, True, tol))
    out.append(control.gamma_commutator_check(fs, False, tol))
    dev = opnorm_max(control.number_operator_via_gamma(fs) - control.number_operator_sites(fs))
    out.append(
        CheckReport.of(
            "gamma_dag gamma = sum_p a^dag_p a_p", "controlled-creation/number", dev, tol, backend=fs.backend, config=fs.snapshot()
        )
    )
    return out


def dynamics_suite(cfg: LatticeConfig, fs: FockSpace | None = None, tol: float | None = None) -> list:
    tol = cfg.tol if tol is None else tol
    out = dynamics.check_representation(cfg) + dynamics.check_module_laws(cfg, tol)
    out.append(dynamics.check_propagator_symmetry(cfg))
    if fs is not None:
        out += dynamics.check_heisenberg_conjugation(fs, tol)
        out += dynamics.check_field_heisenberg(fs, tol)
    return out


def propagator_suite(fs: FockSpace, tol: float | None = None) -> list:
    """Both propagator routes on every ``(dx, dt)`` with ``(y, ty)`` at the origin."""
    cfg = fs.cfg
    tol = cfg.tol if tol is None else tol
    origin = all_positions(cfg)[cfg.size // 2]
    t0 = dynamics.time_point(cfg, 0)
    dev = 0.0
    rows = []
    for x in all_positions(cfg):
        for t in dynamics.all_times(cfg):
            r = dynamics.propagator_check(fs, x, t, origin, t0, tol)
            dev = max(dev, r.deviation)
            rows.append(r)
    out = [
        CheckReport.of(
            "propagator: commutator route = direct sum",
            "dynamics/propagator",
            dev,
            tol,
            backend=fs.backend,
            config=fs.snapshot(),
            details={"pairs": len(rows), "structural": not all(r.details["residue_passed"] for r in rows)},
        )
    ]
    x1 = all_positions(cfg)[(cfg.size // 2 + 1) % cfg.size]
    out += dynamics.check_translation_invariance(fs, x1 - origin, dynamics.time_point(cfg, 1))
    return out


def backend_equivalence(cfg: LatticeConfig, n_words: int = 50, max_len: int = 4, n_max: int = 4, seed: int = 0, tol: float = 1e-12) -> CheckReport:
    """Random ladder words on the vacuum, dense versus sparse with cutoff ``n_max``."""
    dense = FockSpace(cfg, "dense")
    sparse = FockSpace(cfg, "sparse", n_max=n_max)
    rng = np.random.default_rng(seed)
    sites = all_momenta(cfg)
    dev = 0.0
    flagged = 0
    for _ in range(n_words):
        length = int(rng.integers(1, max_len + 1))
        word = [(sites[int(rng.integers(len(sites)))], (LOWER, RAISE)[int(rng.integers(2))]) for _ in range(length)]
        vd, vs = fock.vacuum(dense), fock.vacuum(sparse)
        for p, kind in word:
            vd = fock.site_ladder(dense, p, kind) @ vd
            vs = fock.site_ladder(sparse, p, kind) @ vs
        flagged += vs.truncated
        dev = max(dev, float(np.abs(sparse.embed(vs, dense).data - vd.data).max()))
        dev = max(dev, float(np.abs(dense.embed(vd, sparse).data - vs.data).max()))
    return CheckReport.of(
        "dense = sparse on ladder words",
        "field/backends",
        dev,
        tol,
        backend="dense+sparse",
        config={**cfg.snapshot(), "n_max": n_max},
        details={"words": n_words, "max_len": max_len, "seed": seed, "truncated_words": int(flagged)},
    )


# ---------------------------------------------------------------- run_all


def default_backend(cfg: LatticeConfig, max_dim: int = DENSE_CAP) -> str:
    return "dense" if (cfg.tau + 1) ** cfg.size <= max_dim else "sparse"


def _companion(cfg, fs, max_dim):
    """A dense field for the corner-sensitive suites: ``fs`` itself, or the ``m_uv = 1`` lattice."""
    if fs.backend == "dense":
        return fs
    small = cfg.with_(m_uv=1)
    if (small.tau + 1) ** small.size <= max_dim:
        return FockSpace(small, "dense", max_dim=max_dim)
    return None


def run_all(cfg: LatticeConfig, backend: str = "sparse", n_max: int = 3, max_dim: int = DENSE_CAP) -> list:
    """Every law check for ``cfg`` in a fixed order.

    Field-level suites that need top-level corners run on a dense companion
    (the same lattice if it fits under ``max_dim``, else ``m_uv = 1``); each
    report's ``config`` records the lattice it ran on.  A massless lattice
    stops after the dispersion error; the remaining suites are returned as
    skipped.
    """
    out = lattice_suite(cfg)
    out += oscillator_suite(sorted({1, 2, 3, cfg.tau}))
    try:
        out += dispersion_suite(cfg)
    except ZeroEnergyModeError as exc:
        err = CheckReport.skipped("dispersion", "dynamics/dispersion", str(exc), config=cfg.snapshot())
        err.details["structural"] = True
        out.append(err)
        for suite in ("field", "observables", "control", "dynamics", "propagator", "derivation"):
            out.append(CheckReport.skipped(suite, suite, "zero-energy mode in the dispersion", config=cfg.snapshot()))
        return out
    if backend == "auto":
        backend = default_backend(cfg, max_dim)
    fs = FockSpace(cfg, backend, n_max=n_max if backend == "sparse" else None, max_dim=max_dim)
    dense = _companion(cfg, fs, max_dim)
    field_fs = dense if dense is not None else fs

    out += ccr_suite(field_fs)
    out += fock_suite(fs)
    out += relativistic_suite(fs)
    if dense is not None and dense.cfg.size <= 9:
        out.append(backend_equivalence(dense.cfg))
    out += observables_suite(cfg)
    out += control_suite(field_fs)
    out += dynamics_suite(cfg, fs)
    if dense is not None:
        out += dynamics.heisenberg_gamma_checks(dense)
    out += propagator_suite(fs)
    if dense is not None and dense is not fs:
        out += propagator_suite(dense)
    if dense is not None:
        out += appendix_chain(dense)
        origin = all_positions(dense.cfg)[dense.cfg.size // 2]
        t0 = dynamics.time_point(dense.cfg, 0)
        for x in all_positions(dense.cfg):
            out += propagator_chain(dense, x, dynamics.time_point(dense.cfg, 1), origin, t0)
    else:
        out.append(CheckReport.skipped("derivation chain", ANCHOR, "no dense field fits under the dimension cap"))
    return out


def structural(reports) -> bool:
    """Whether any report signals a structural failure rather than a failed law."""
    return any(r.details.get("structural") for r in reports)
