"""Coherently controlled creation and destruction operators.

``gamma_dag : F ⊗ V -> F`` takes a field state and a control vector ``v`` in
the group algebra and creates a particle in the superposition of momenta
described by ``v``::

    gamma_dag(xi ⊗ v) = sum_p m_ir^-n (2E_p)^-1 <chi_p^rel | v> a^dag(p) xi

Its adjoint ``gamma : F -> F ⊗ V`` is ``sum_p m_ir^-n (2E_p)^-1 a(p) ⊗ |chi_p^rel>``.
Plugging a control vector into the destruction side means contracting with
``<v|``, so ``gamma_v = (id ⊗ <v|) gamma`` is conjugate-linear in ``v`` and is
exactly the adjoint of ``gamma_dag_v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import FockSpace, LOWER, RAISE, field_phi, rel_ladder, rescaled_ladder, site_ladder
from .lattice import PositionPoint, all_positions, carrier_space, character_vector, inner, tables
from .linalg import LinOp, StateVec, bra, comm, ket, opnorm_max, root_of_unity, tensor, tensor_space
from .observables import rel_character_vector, rel_delta_vector
from .report import CheckReport

__all__ = [
    "ControlledOp",
    "build_gamma_dagger",
    "build_gamma",
    "apply_gamma_to_position",
    "phi_plus",
    "phi_minus",
    "gamma_commutator_check",
    "gamma_commutator_pair",
    "number_operator_via_gamma",
    "recovery_checks",
]

ANCHOR = "controlled-creation"
CREATION, DESTRUCTION = "creation", "destruction"


@dataclass(frozen=True, eq=False)
class ControlledOp:
    """A field operator with a control wire.

    ``creation``: ``op : F ⊗ C -> F``.  ``destruction``: ``op : F -> F ⊗ C``.
    """

    op: LinOp
    direction: str
    fs: FockSpace
    control: object

    def evaluate(self, v: StateVec) -> LinOp:
        """Plug ``v`` into the control wire, giving an operator on the field."""
        I = self.fs.identity()
        if self.direction == CREATION:
            return self.op @ tensor(I, ket(v))
        return tensor(I, bra(v)) @ self.op


def _measure(fs):
    E = fs.dispersion.energies
    return 1.0 / fs.cfg.m_ir**fs.cfg.n / (2 * E)


def _branches(fs, kind):
    """``(c_p, a(p) or a^dag(p), chi_p^rel)`` for every site."""
    c = _measure(fs)
    for i, p in enumerate(fs.sites):
        yield c[i], rel_ladder(fs, p, kind), rel_character_vector(p)


def _sum(fs, parts, dom, cod):
    acc = None
    lost = None
    for op in parts:
        acc = op.mat if acc is None else acc + op.mat
        if op.lost is not None:
            lost = op.lost.copy() if lost is None else lost | op.lost
    return LinOp(sp.csr_array(acc), dom, cod, lost)


def build_gamma_dagger(fs: FockSpace) -> ControlledOp:
    V = carrier_space(fs.cfg)
    parts = []
    for c, ad, chi in _branches(fs, RAISE):
        parts.append(c * tensor(ad, bra(chi)))
    return ControlledOp(_sum(fs, parts, tensor_space(fs.space, V), fs.space), CREATION, fs, V)


def build_gamma(fs: FockSpace) -> ControlledOp:
    """The destruction partner, built from lowering operators so no cutoff is crossed."""
    V = carrier_space(fs.cfg)
    parts = []
    for c, a, chi in _branches(fs, LOWER):
        parts.append(c * tensor(a, ket(chi)))
    return ControlledOp(_sum(fs, parts, fs.space, tensor_space(fs.space, V)), DESTRUCTION, fs, V)


def _gammas(fs):
    g = fs._cache.get("gammas")
    if g is None:
        g = fs._cache["gammas"] = (build_gamma_dagger(fs), build_gamma(fs))
    return g


def apply_gamma_to_position(fs: FockSpace, x: PositionPoint, direction: str) -> LinOp:
    """``gamma_dag`` at ``delta_x^rel`` gives ``phi^-(x)``; ``gamma`` gives ``phi^+(x)``."""
    gd, g = _gammas(fs)
    v = rel_delta_vector(x)
    if direction == CREATION:
        return gd.evaluate(v)
    if direction == DESTRUCTION:
        return g.evaluate(v)
    raise ValueError(f"direction must be {CREATION!r} or {DESTRUCTION!r}")


def _phase_sum(fs, x, kind, sign):
    ph = root_of_unity(sign * tables(fs.cfg).pairing[:, x.index], fs.cfg.M)
    c = _measure(fs)
    parts = [c[i] * ph[i] * rel_ladder(fs, p, kind) for i, p in enumerate(fs.sites)]
    return _sum(fs, parts, fs.space, fs.space)


def phi_plus(fs: FockSpace, x: PositionPoint) -> LinOp:
    """``sum_p m_ir^-n (2E_p)^-1 a(p) exp(2 pi i p.x)`` from the lattice sum."""
    return _phase_sum(fs, x, LOWER, +1)


def phi_minus(fs: FockSpace, x: PositionPoint) -> LinOp:
    return _phase_sum(fs, x, RAISE, -1)


def recovery_checks(fs: FockSpace, tol: float | None = None) -> list:
    """The four plug-in identities, each maximised over the lattice.

    ``gamma_dag(chi_p^rel) = a^dag(p)``, ``gamma_dag(chi_p) = a^dag(p_)``,
    ``gamma_dag(delta_x^rel) = phi^-(x)``, ``gamma(delta_x^rel) = phi^+(x)``,
    plus ``phi^+ + phi^- = phi`` and the destruction analogues of the first two.
    """
    tol = fs.cfg.tol if tol is None else tol
    gd, g = _gammas(fs)
    dev = {k: 0.0 for k in ("momentum_rel", "momentum", "destroy_rel", "destroy", "position_minus", "position_plus", "phi_split")}
    for p in fs.sites:
        chi_rel, chi = rel_character_vector(p), character_vector(p)
        dev["momentum_rel"] = max(dev["momentum_rel"], opnorm_max(gd.evaluate(chi_rel) - rel_ladder(fs, p, RAISE)))
        dev["momentum"] = max(dev["momentum"], opnorm_max(gd.evaluate(chi) - rescaled_ladder(fs, p, RAISE)))
        dev["destroy_rel"] = max(dev["destroy_rel"], opnorm_max(g.evaluate(chi_rel) - rel_ladder(fs, p, LOWER)))
        dev["destroy"] = max(dev["destroy"], opnorm_max(g.evaluate(chi) - rescaled_ladder(fs, p, LOWER)))
    for x in all_positions(fs.cfg):
        pm, pp = phi_minus(fs, x), phi_plus(fs, x)
        dev["position_minus"] = max(dev["position_minus"], opnorm_max(apply_gamma_to_position(fs, x, CREATION) - pm))
        dev["position_plus"] = max(dev["position_plus"], opnorm_max(apply_gamma_to_position(fs, x, DESTRUCTION) - pp))
        dev["phi_split"] = max(dev["phi_split"], opnorm_max(pp + pm - field_phi(fs, x)))
    return [
        CheckReport.of(f"gamma_recovery[{k}]", f"{ANCHOR}/recovery", v, tol, backend=fs.backend, config=fs.snapshot())
        for k, v in dev.items()
    ]


def gamma_commutator_pair(fs: FockSpace, u: StateVec, v: StateVec, tol: float | None = None, name: str = "gamma_commutator") -> CheckReport:
    """``[gamma_u, gamma_dag_v] =_tau <u, v> id``, with one top-level corner allowed per site."""
    gd, g = _gammas(fs)
    lam = inner(u, v)
    C = comm(g.evaluate(u), gd.evaluate(v))
    r = fs.equal_up_to_tau_local(C, lam * fs.identity(), tol=tol, name=name)
    r.scalar = lam
    return r


def gamma_commutator_check(fs: FockSpace, relativistic: bool = True, tol: float | None = None) -> CheckReport:
    """Evaluate the controlled commutator on every pair of momentum eigenstates.

    Diagonal pairs must be ``=_tau`` to ``<chi_p, chi_p> id`` with the corner on
    site ``p`` alone; off-diagonal pairs must vanish exactly.
    """
    tol = fs.cfg.tol if tol is None else tol
    gd, g = _gammas(fs)
    vec = rel_character_vector if relativistic else character_vector
    states = [vec(p) for p in fs.sites]
    ups = [g.evaluate(s) for s in states]
    downs = [gd.evaluate(s) for s in states]
    I = fs.identity()
    dev = 0.0
    scalars, corners = [], []
    for i, p in enumerate(fs.sites):
        for j in range(len(fs.sites)):
            C = comm(ups[i], downs[j])
            if i != j:
                dev = max(dev, _max_on(C, fs.valid_columns(C)))
                continue
            norm = states[i].norm2()
            r = fs.equal_up_to_tau(C, norm * I, [p], tol=tol)
            dev = max(dev, r.deviation)
            scalars.append(norm)
            corners.append(r.tau_scalar)
    name = "gamma_commutator[" + ("rel" if relativistic else "nonrel") + "]"
    return CheckReport.of(
        name,
        f"{ANCHOR}/commutator",
        dev,
        tol,
        scalar=scalars[0] if len(set(np.round(scalars, 12))) == 1 else None,
        tau_scalar=corners[0] if corners and all(c is not None and abs(c - corners[0]) <= tol for c in corners) else None,
        backend=fs.backend,
        config=fs.snapshot(),
        details={"diagonal_scalars": scalars, "corner_scalars": corners},
    )


def _max_on(A: LinOp, columns) -> float:
    m = A.sparse()[:, np.flatnonzero(columns)]
    return float(np.abs(m.data).max()) if m.nnz else 0.0


def number_operator_via_gamma(fs: FockSpace) -> LinOp:
    """``gamma_dag ∘ gamma``: destroy, carry the momentum on the control wire, recreate.

    The control wire carries the measure ``m_ir^-n (2E_p)^-1`` on each side and
    the ``<chi_p^rel, chi_p^rel> = 2E_p m_ir^n`` contraction in between, which
    leaves ``sum_p a^dag_p a_p``.
    """
    gd, g = _gammas(fs)
    return gd.op @ g.op


def number_operator_sites(fs: FockSpace) -> LinOp:
    """``sum_p a^dag_p a_p`` from the bare site operators."""
    acc = None
    for p in fs.sites:
        t = site_ladder(fs, p, RAISE) @ site_ladder(fs, p, LOWER)
        acc = t if acc is None else acc + t
    return acc
