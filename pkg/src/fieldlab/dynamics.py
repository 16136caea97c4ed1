"""Time evolution on the lattice.

Time is a one-dimensional copy of the position lattice: ``t = j / m_uv`` with
``j`` taken modulo ``M``.  With energies on the ``1/m_ir`` grid every phase
``exp(2 pi i E_p t)`` is ``omega**(units_p * j)`` for ``omega = exp(2 pi i / M)``
and is read from the exact root-of-unity table.  The phase convention is
``exp(+2 pi i E_p t)`` throughout (``h = 1``).
"""

from __future__ import annotations


import numpy as np
import scipy.sparse as sp

from .control import ControlledOp, CREATION, DESTRUCTION, _gammas, _max_on, _measure
from .dispersion import Dispersion, dispersion_table
from .errors import ConfigError, StructuralFailure
from .fock import FockSpace, LOWER, RAISE, field_phi, rel_ladder, rescaled_ladder, vacuum
from .lattice import (
    LatticeConfig,
    MomentumPoint,
    PositionPoint,
    all_momenta,
    all_positions,
    carrier_space,
    character_vector,
    delta_vector,
    tables,
)
from .linalg import LinOp, StateVec, bra, comm, dagger, identity, ket, opnorm_max, root_of_unity, tensor, tensor_space, to_coo_text
from .observables import momentum_algebra, position_algebra, rel_character_vector, rel_delta_vector
from .report import CheckReport

__all__ = [
    "TimePoint",
    "time_config",
    "time_point",
    "all_times",
    "time_space",
    "time_state",
    "energy_state",
    "time_translation",
    "coherent_module",
    "check_representation",
    "check_module_laws",
    "heisenberg_ladder",
    "check_heisenberg_conjugation",
    "heisenberg_gamma_dagger",
    "heisenberg_gamma",
    "heisenberg_gamma_checks",
    "field_heisenberg",
    "check_field_heisenberg",
    "propagator_direct",
    "propagator_check",
    "propagator",
    "check_translation_invariance",
    "check_propagator_symmetry",
    "check_periodicity",
    "degeneracy_histogram",
    "dispersion_rows",
]

ANCHOR = "dynamics"


class TimePoint(PositionPoint):
    """Time ``t = j / m_uv`` on the one-dimensional lattice."""

    @property
    def t(self):
        return self.value[0]


def time_config(cfg: LatticeConfig) -> LatticeConfig:
    return cfg.time_config()


def time_point(cfg: LatticeConfig, j: int) -> TimePoint:
    M, h = cfg.M, cfg.half
    return TimePoint(((int(j) + h) % M - h,), time_config(cfg))


def all_times(cfg: LatticeConfig) -> list:
    return [TimePoint(x.j, x.cfg) for x in all_positions(time_config(cfg))]


def _as_time(cfg, t):
    if isinstance(t, PositionPoint):
        if t.cfg != time_config(cfg):
            raise ConfigError("time point from a different configuration")
        return t if isinstance(t, TimePoint) else TimePoint(t.j, t.cfg)
    return time_point(cfg, t)


def _as_position(cfg, x):
    if isinstance(x, PositionPoint):
        if x.cfg != cfg:
            raise ConfigError("position from a different configuration")
        return x
    x = np.atleast_1d(np.asarray(x, dtype=int))
    M, h = cfg.M, cfg.half
    return PositionPoint(tuple((x + h) % M - h), cfg)


def time_space(cfg: LatticeConfig):
    """The time wire, weight ``1 / m_uv``."""
    return carrier_space(time_config(cfg))


def time_state(t: TimePoint) -> StateVec:
    """``|t>`` with square norm ``m_uv``."""
    return delta_vector(t)


def energy_state(cfg: LatticeConfig, units: int) -> StateVec:
    """``eps_E(t) = exp(2 pi i E t)`` for ``E = units / m_ir``; square norm ``m_ir``."""
    tc = time_config(cfg)
    h = tc.half
    return character_vector(MomentumPoint(((int(units) + h) % tc.M - h,), tc))


def _disp(cfg) -> Dispersion:
    return dispersion_table(cfg)


def _rel_basis(cfg):
    """Columns ``chi_p^rel`` and the measure ``m_ir^-n (2E_p)^-1``."""
    B = np.column_stack([rel_character_vector(p).data for p in all_momenta(cfg)])
    E = _disp(cfg).energies
    return B, 1.0 / cfg.m_ir**cfg.n / (2 * E)


def time_translation(cfg: LatticeConfig, t) -> LinOp:
    """``U_t = sum_p m_ir^-n (2E_p)^-1 exp(2 pi i E_p t) |chi_p^rel><chi_p^rel|``."""
    t = _as_time(cfg, t)
    B, c = _rel_basis(cfg)
    V = carrier_space(cfg)
    ph = root_of_unity(_disp(cfg).units * t.j[0], cfg.M)
    mat = (B * (c * ph)[None, :]) @ (B.conj().T * V.gram[None, :])
    return LinOp(mat, V, V)


def coherent_module(cfg: LatticeConfig) -> LinOp:
    """``U : V ⊗ T -> V`` with ``U(v ⊗ |t>) = U_t v``.

    ``U = sum_t (1/m_uv) U_t ⊗ <e_t|`` where ``<e_t|`` reads the ``t``
    coordinate; the ``1/m_uv`` is the measure on the time wire and cancels the
    ``m_uv`` in ``|t>``.
    """
    V, T = carrier_space(cfg), time_space(cfg)
    M = cfg.M
    mat = np.zeros((V.dim, V.dim * M), dtype=complex)
    for t in all_times(cfg):
        Ut = time_translation(cfg, t).mat
        mat[:, t.index :: M] = Ut / cfg.m_uv
    return LinOp(mat, tensor_space(V, T), V)


def check_representation(cfg: LatticeConfig, tol: float = 1e-12) -> list:
    """``U_t U_s = U_{t+s}``, ``U_0 = id``, ``U_t^dag = U_{-t}`` and unitarity."""
    times = all_times(cfg)
    U = {t: time_translation(cfg, t) for t in times}
    V = carrier_space(cfg)
    I = identity(V, sparse=False).dense()
    law = max(opnorm_max((U[t] @ U[s]).dense() - U[t + s].dense()) for t in times for s in times)
    zero = opnorm_max(U[time_point(cfg, 0)].dense() - I)
    adj = max(opnorm_max(dagger(U[t]).dense() - U[-t].dense()) for t in times)
    uni = max(opnorm_max((dagger(U[t]) @ U[t]).dense() - I) for t in times)
    snap = cfg.snapshot()
    return [
        CheckReport.of("U_t U_s = U_(t+s)", f"{ANCHOR}/representation", law, tol, config=snap),
        CheckReport.of("U_0 = id", f"{ANCHOR}/representation", zero, tol, config=snap),
        CheckReport.of("U_t^dag = U_(-t)", f"{ANCHOR}/representation", adj, tol, config=snap),
        CheckReport.of("U_t unitary", f"{ANCHOR}/representation", uni, tol, config=snap),
    ]


def _time_algebras(cfg):
    tc = time_config(cfg)
    return momentum_algebra(tc), position_algebra(tc)


def check_module_laws(cfg: LatticeConfig, tol: float = 1e-9) -> list:
    """Module laws of the coherent representation.

    multiplicativity
        ``U (U ⊗ id_T) = U (id_V ⊗ mult)`` where ``mult`` is group addition
        on time states (the momentum-copying algebra on the time wire).
    unit
        ``U (id_V ⊗ |0>) = id_V``; ``|0>`` is the unit of that algebra.
    unitarity
        ``W = (U ⊗ id_T)(id_V ⊗ comult_X)`` is unitary, ``comult_X`` copying
        time states.
    diagonalisation
        ``U (|chi_p> ⊗ id_T) = |chi_p><eps_{-E_p}|`` for every ``p``.
    """
    V, T = carrier_space(cfg), time_space(cfg)
    U = coherent_module(cfg)
    IV, IT = identity(V, sparse=False), identity(T, sparse=False)
    Zt, Xt = _time_algebras(cfg)
    snap = cfg.snapshot()
    out = []
    lhs = U @ tensor(U, IT)
    rhs = U @ tensor(IV, Zt.mult)
    out.append(CheckReport.of("module multiplicativity", f"{ANCHOR}/module-multiplicativity", opnorm_max(lhs.dense() - rhs.dense()), tol, config=snap))
    u0 = ket(time_state(time_point(cfg, 0)))
    dev = opnorm_max((U @ tensor(IV, u0)).dense() - IV.dense())
    unit_gap = opnorm_max(Zt.unit.data - time_state(time_point(cfg, 0)).data)
    out.append(CheckReport.of("module unit", f"{ANCHOR}/module-unit", max(dev, unit_gap), tol, config=snap))
    W = tensor(U, IT) @ tensor(IV, Xt.comult)
    I2 = np.eye(V.dim * T.dim)
    dev = max(opnorm_max((dagger(W) @ W).dense() - I2), opnorm_max((W @ dagger(W)).dense() - I2))
    out.append(CheckReport.of("module unitarity", f"{ANCHOR}/module-unitarity", dev, tol, config=snap))
    units = _disp(cfg).units
    dev = 0.0
    for i, p in enumerate(all_momenta(cfg)):
        chi = character_vector(p)
        lhs = U @ tensor(ket(chi), IT)
        rhs = ket(chi) @ bra(energy_state(cfg, -units[i]))
        dev = max(dev, opnorm_max(lhs.dense() - rhs.dense()))
    out.append(CheckReport.of("module diagonalisation", f"{ANCHOR}/module-diagonal", dev, tol, config=snap))
    return out


def _time_phases(fs: FockSpace, t: TimePoint) -> np.ndarray:
    """Diagonal of ``exp(2 pi i H t)`` in the occupation basis, exact."""
    units = fs.dispersion.units
    return root_of_unity((fs.occupations @ units) * t.j[0], fs.cfg.M)


def heisenberg_ladder(fs: FockSpace, p: MomentumPoint, t, kind: str) -> LinOp:
    """``exp(+2 pi i E_p t) a^dag(p_)`` or ``exp(-2 pi i E_p t) a(p_)``."""
    t = _as_time(fs.cfg, t)
    e = fs.dispersion.unit(p) * t.j[0]
    sign = 1 if kind == RAISE else -1
    return complex(root_of_unity(sign * e, fs.cfg.M)) * rescaled_ladder(fs, p, kind)


def check_heisenberg_conjugation(fs: FockSpace, tol: float | None = None) -> list:
    """``exp(2 pi i H t) a exp(-2 pi i H t)`` against the phased ladder operators, all ``p``, ``t``."""
    tol = fs.cfg.tol if tol is None else tol
    conj_dev = adj_dev = 0.0
    for t in all_times(fs.cfg):
        d = _time_phases(fs, t)
        D, Dinv = sp.diags_array(d), sp.diags_array(np.conj(d))
        for p in fs.sites:
            for kind in (RAISE, LOWER):
                A = rescaled_ladder(fs, p, kind)
                lhs = (D @ A.mat @ Dinv).tocsr()
                rhs = heisenberg_ladder(fs, p, t, kind).mat
                conj_dev = max(conj_dev, opnorm_max(lhs - rhs))
            up, down = heisenberg_ladder(fs, p, t, RAISE), heisenberg_ladder(fs, p, t, LOWER)
            adj_dev = max(adj_dev, _max_on(dagger(up) - down, np.ones(fs.dim, bool)))
    snap = fs.snapshot()
    return [
        CheckReport.of("heisenberg conjugation", f"{ANCHOR}/heisenberg", conj_dev, tol, backend=fs.backend, config=snap),
        CheckReport.of("heisenberg adjoint pair", f"{ANCHOR}/heisenberg", adj_dev, tol, backend=fs.backend, config=snap),
    ]


def _heis_rows(fs):
    """Per-branch ``(c_p, chi_p^rel, eps_{-E_p})``."""
    c = _measure(fs)
    units = fs.dispersion.units
    for i, p in enumerate(fs.sites):
        yield i, p, c[i], rel_character_vector(p), energy_state(fs.cfg, -units[i])


def heisenberg_gamma_dagger(fs: FockSpace, composed: bool = False) -> ControlledOp:
    """``gamma_bar_dag : F ⊗ V ⊗ T -> F``.

    ``composed=True`` returns ``gamma_dag ∘ (id_F ⊗ U)``; the default builds the
    branch sum ``sum_p c_p a^dag(p) ⊗ <chi_p^rel| ⊗ <eps_{-E_p}|`` directly.
    """
    V, T = carrier_space(fs.cfg), time_space(fs.cfg)
    C = tensor_space(V, T)
    if composed:
        gd, _ = _gammas(fs)
        op = gd.op @ tensor(fs.identity(), coherent_module(fs.cfg).as_sparse())
        return ControlledOp(op, CREATION, fs, C)
    acc, lost = None, None
    for i, p, c, chi, eps in _heis_rows(fs):
        term = c * tensor(rel_ladder(fs, p, RAISE), bra(chi).as_sparse(), bra(eps).as_sparse())
        acc = term.mat if acc is None else acc + term.mat
        if term.lost is not None:
            lost = term.lost if lost is None else lost | term.lost
    return ControlledOp(LinOp(sp.csr_array(acc), tensor_space(fs.space, C), fs.space, lost), CREATION, fs, C)


def heisenberg_gamma(fs: FockSpace) -> ControlledOp:
    """Destruction partner ``sum_p c_p a(p) ⊗ |chi_p^rel> ⊗ |eps_{-E_p}>``."""
    V, T = carrier_space(fs.cfg), time_space(fs.cfg)
    C = tensor_space(V, T)
    acc = None
    for i, p, c, chi, eps in _heis_rows(fs):
        term = c * tensor(rel_ladder(fs, p, LOWER), ket(chi).as_sparse(), ket(eps).as_sparse())
        acc = term.mat if acc is None else acc + term.mat
    return ControlledOp(LinOp(sp.csr_array(acc), fs.space, tensor_space(fs.space, C)), DESTRUCTION, fs, C)


def _control_state(v: StateVec, t: TimePoint) -> StateVec:
    w = time_state(t)
    return StateVec(tensor_space(v.space, w.space), np.kron(v.data, w.data))


def field_heisenberg(fs: FockSpace, x, t, part: str = "full") -> LinOp:
    """``phi^+(x, t) = sum_p c_p a(p) exp(-2 pi i p.x)`` and its partner, ``p.x := E_p t - p_.x_``."""
    cfg = fs.cfg
    x, t = _as_position(cfg, x), _as_time(cfg, t)
    if part not in ("plus", "minus", "full"):
        raise ValueError(f"part must be plus, minus or full, got {part!r}")
    r = fs.dispersion.units * t.j[0] - tables(cfg).pairing[:, x.index]
    c = _measure(fs)
    acc, lost = None, None
    terms = []
    if part in ("plus", "full"):
        ph = root_of_unity(-r, cfg.M)
        terms += [(c[i] * ph[i], rel_ladder(fs, p, LOWER)) for i, p in enumerate(fs.sites)]
    if part in ("minus", "full"):
        ph = root_of_unity(r, cfg.M)
        terms += [(c[i] * ph[i], rel_ladder(fs, p, RAISE)) for i, p in enumerate(fs.sites)]
    for coef, op in terms:
        m = coef * op.mat
        acc = m if acc is None else acc + m
        if op.lost is not None:
            lost = op.lost if lost is None else lost | op.lost
    return LinOp(sp.csr_array(acc), fs.space, fs.space, lost)


def heisenberg_gamma_checks(fs: FockSpace, tol: float | None = None) -> list:
    """Direct versus composed build, the ``t = 0`` reduction, and the plug-in identities."""
    tol = fs.cfg.tol if tol is None else tol
    cfg = fs.cfg
    direct = heisenberg_gamma_dagger(fs)
    composed = heisenberg_gamma_dagger(fs, composed=True)
    destroy = heisenberg_gamma(fs)
    gd, _ = _gammas(fs)
    build = _max_on(direct.op - composed.op, np.ones(direct.op.dom.dim, bool))
    t0 = time_point(cfg, 0)
    reduce0 = max(
        opnorm_max(direct.evaluate(_control_state(v, t0)) - gd.evaluate(v))
        for v in (rel_character_vector(p) for p in fs.sites)
    )
    mom = pos = pos_plus = 0.0
    for t in all_times(cfg):
        for i, p in enumerate(fs.sites):
            lhs = direct.evaluate(_control_state(rel_character_vector(p), t))
            ph = complex(root_of_unity(fs.dispersion.units[i] * t.j[0], cfg.M))
            mom = max(mom, opnorm_max(lhs - ph * rel_ladder(fs, p, RAISE)))
        for x in all_positions(cfg):
            s = _control_state(rel_delta_vector(x), t)
            pos = max(pos, opnorm_max(direct.evaluate(s) - field_heisenberg(fs, x, t, "minus")))
            pos_plus = max(pos_plus, opnorm_max(destroy.evaluate(s) - field_heisenberg(fs, x, t, "plus")))
    snap = fs.snapshot()
    kw = dict(backend=fs.backend, config=snap)
    return [
        CheckReport.of("heisenberg gamma direct = composed", f"{ANCHOR}/heisenberg-gamma", build, tol, **kw),
        CheckReport.of("heisenberg gamma at t=0", f"{ANCHOR}/heisenberg-gamma", reduce0, tol, **kw),
        CheckReport.of("heisenberg gamma momentum recovery", f"{ANCHOR}/heisenberg-gamma", mom, tol, **kw),
        CheckReport.of("heisenberg gamma position recovery (minus)", f"{ANCHOR}/heisenberg-gamma", pos, tol, **kw),
        CheckReport.of("heisenberg gamma position recovery (plus)", f"{ANCHOR}/heisenberg-gamma", pos_plus, tol, **kw),
    ]


def check_field_heisenberg(fs: FockSpace, tol: float | None = None) -> list:
    """``t = 0`` full field equals ``phi(x)``; ``phi^+`` and ``phi^-`` are adjoint; ``phi^+ |0> = 0``."""
    tol = fs.cfg.tol if tol is None else tol
    cfg = fs.cfg
    zero = adj = vac = 0.0
    t0 = time_point(cfg, 0)
    v0 = vacuum(fs)
    for x in all_positions(cfg):
        zero = max(zero, opnorm_max(field_heisenberg(fs, x, t0) - field_phi(fs, x)))
        for t in all_times(cfg):
            plus = field_heisenberg(fs, x, t, "plus")
            minus = field_heisenberg(fs, x, t, "minus")
            adj = max(adj, _max_on(dagger(plus) - minus, np.ones(fs.dim, bool)))
            vac = max(vac, float(np.abs((plus @ v0).data).max()))
    kw = dict(backend=fs.backend, config=fs.snapshot())
    return [
        CheckReport.of("phi(x, 0) = phi(x)", f"{ANCHOR}/field", zero, tol, **kw),
        CheckReport.of("phi+(x, t)^dag = phi-(x, t)", f"{ANCHOR}/field", adj, tol, **kw),
        CheckReport.of("phi+(x, t)|0> = 0", f"{ANCHOR}/field", vac, tol, **kw),
    ]


def _phase_index(cfg, dx: PositionPoint, dt: TimePoint):
    units = _disp(cfg).units
    return units * dt.j[0] - tables(cfg).pairing[:, dx.index]


def propagator_direct(cfg: LatticeConfig, dx, dt) -> complex:
    """``D = sum_p m_ir^-n (2E_p)^-1 exp(-2 pi i (E_p dt - p_.dx))``."""
    dx, dt = _as_position(cfg, dx), _as_time(cfg, dt)
    E = _disp(cfg).energies
    c = 1.0 / cfg.m_ir**cfg.n / (2 * E)
    return complex(np.sum(c * root_of_unity(-_phase_index(cfg, dx, dt), cfg.M)))


def propagator_check(fs: FockSpace, x, tx, y, ty, tol: float | None = None) -> CheckReport:
    """Commutator route: ``[phi^+(x, tx), phi^-(y, ty)] =_tau D id``.

    ``D`` is read from the vacuum entry; the residue ``C - D id`` must sit on
    the single-site top-level corners (truncated columns excluded).  The
    deviation also includes ``|D - D_direct|``.
    """
    cfg = fs.cfg
    tol = cfg.tol if tol is None else tol
    x, y = _as_position(cfg, x), _as_position(cfg, y)
    tx, ty = _as_time(cfg, tx), _as_time(cfg, ty)
    C = comm(field_heisenberg(fs, x, tx, "plus"), field_heisenberg(fs, y, ty, "minus"))
    lam = C.entry(0, 0)
    residue = fs.equal_up_to_tau_local(C, lam * fs.identity(), tol=tol, name="propagator residue")
    direct = propagator_direct(cfg, x - y, tx - ty)
    gap = abs(lam - direct)
    return CheckReport.of(
        f"propagator[x={x.j},tx={tx.j[0]},y={y.j},ty={ty.j[0]}]",
        f"{ANCHOR}/propagator",
        max(residue.deviation, gap),
        tol,
        scalar=lam,
        backend=fs.backend,
        config=fs.snapshot(),
        details={
            "direct": direct,
            "route_gap": gap,
            "residue_deviation": residue.deviation,
            "residue_passed": residue.passed,
            "dx": (x - y).j,
            "dt": (tx - ty).j[0],
        },
    )


def propagator(fs: FockSpace, x, tx, y, ty, tol: float | None = None) -> complex:
    """The commutator-route propagator; a non-scalar commutator is a structural failure."""
    r = propagator_check(fs, x, tx, y, ty, tol)
    if not r.details["residue_passed"]:
        x, y = _as_position(fs.cfg, x), _as_position(fs.cfg, y)
        tx, ty = _as_time(fs.cfg, tx), _as_time(fs.cfg, ty)
        C = comm(field_heisenberg(fs, x, tx, "plus"), field_heisenberg(fs, y, ty, "minus"))
        raise StructuralFailure(
            f"commutator is not proportional to the identity up to tau (residue {r.details['residue_deviation']:.3e})",
            payload={"report": r.to_dict(), "matrix": to_coo_text(C, "commutator")},
        )
    return r.scalar


def check_translation_invariance(fs: FockSpace, dx, dt, tol: float = 1e-12) -> list:
    """Shift both arguments over every lattice point and time; direct sums must be bit-identical."""
    cfg = fs.cfg
    dx, dt = _as_position(cfg, dx), _as_time(cfg, dt)
    ref = propagator_direct(cfg, dx, dt)
    direct_dev = 0.0
    comm_vals = []
    for y in all_positions(cfg):
        for ty in all_times(cfg):
            x, tx = y + dx, ty + dt
            d = propagator_direct(cfg, x - y, tx - ty)
            direct_dev = max(direct_dev, 0.0 if d == ref else abs(d - ref) or np.inf)
            C = comm(field_heisenberg(fs, x, tx, "plus"), field_heisenberg(fs, y, ty, "minus"))
            comm_vals.append(C.entry(0, 0))
    comm_dev = float(np.max(np.abs(np.array(comm_vals) - comm_vals[0])))
    kw = dict(backend=fs.backend, config=fs.snapshot(), details={"dx": dx.j, "dt": dt.j[0]})
    return [
        CheckReport.of("translation invariance (direct)", f"{ANCHOR}/propagator", direct_dev, 0.0, **kw),
        CheckReport.of("translation invariance (commutator)", f"{ANCHOR}/propagator", comm_dev, tol, **kw),
    ]


def check_propagator_symmetry(cfg: LatticeConfig, tol: float = 1e-12) -> CheckReport:
    """``conj D(dx, dt) = D(-dx, -dt)`` over the whole lattice."""
    dev = 0.0
    for dx in all_positions(cfg):
        for dt in all_times(cfg):
            dev = max(dev, abs(np.conj(propagator_direct(cfg, dx, dt)) - propagator_direct(cfg, -dx, -dt)))
    return CheckReport.of("propagator conjugation symmetry", f"{ANCHOR}/propagator", dev, tol, config=cfg.snapshot())


def check_periodicity(cfg: LatticeConfig, tol: float = 1e-12) -> CheckReport:
    """Each ``t -> exp(2 pi i E_p t)`` is a character of the time lattice.

    ``E_p m_ir`` must be an integer, and the floating-point phase after one
    full period ``M / m_uv`` must return to 1.
    """
    d = _disp(cfg)
    ints = all(float(u).is_integer() for u in d.units)
    period = cfg.M / cfg.m_uv
    dev = float(np.max(np.abs(np.exp(2j * np.pi * d.energies * period) - 1)))
    return CheckReport.of(
        "energy phases periodic", f"{ANCHOR}/dispersion", dev if ints else np.inf, tol, config=cfg.snapshot(), details={"period": period}
    )


def degeneracy_histogram(cfg: LatticeConfig) -> dict:
    """Quantised energy -> number of lattice momenta at that energy (a measurement)."""
    return _disp(cfg).levels()


def dispersion_rows(cfg: LatticeConfig):
    """``(k, p, E_p, degeneracy)`` per lattice momentum in lexicographic order."""
    d = dispersion_table(cfg, allow_zero_modes=True)
    for p in all_momenta(cfg):
        yield p.k, p.value, d.energy(p), d.degeneracy(p)
