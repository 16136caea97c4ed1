"""Frobenius algebras copying the momentum and position bases.

Each algebra is built from a family ``e_i`` of vectors in the group algebra:
the comultiplication copies it (``e_i -> e_i ⊗ e_i``), the counit sends every
``e_i`` to 1, and the multiplication and unit are their adjoints under the
weighted inner product.  With ``N_i = <e_i, e_i>`` this gives
``mult(e_i ⊗ e_j) = [i = j] N_i e_i`` and ``mult ∘ comult = N_i`` on ``e_i``,
so an orthogonal family of equal norms yields a quasi-special algebra with
constant ``N``.

Four families are provided: characters (momentum, ``Z``), deltas (position,
``X``) and their relativistically normalised variants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import dispersion_table
from .errors import NotOrthogonalError, ShapeError
from .lattice import (
    LatticeConfig,
    MomentumPoint,
    PositionPoint,
    all_momenta,
    all_positions,
    carrier_space,
    character_vector,
    delta_vector,
    fourier_matrix,
    tables,
)
from .linalg import LinOp, SCALARS, Space, StateVec, dagger, fit_scalar, identity, opnorm_max, swap, tensor, tensor_space
from .report import CheckReport

__all__ = [
    "FrobeniusAlgebra",
    "build_algebra",
    "momentum_algebra",
    "position_algebra",
    "rel_momentum_algebra",
    "rel_position_algebra",
    "standard_algebras",
    "rel_character_vector",
    "rel_delta_vector",
    "antipode",
    "cup",
    "cap",
    "check_associative",
    "check_unit",
    "check_commutative",
    "check_frobenius",
    "check_quasi_special",
    "check_strong_complementarity",
]

ANCHOR = "observables"


@dataclass(frozen=True, eq=False)
class FrobeniusAlgebra:
    """Structure maps of a commutative Frobenius algebra on ``space``.

    ``basis`` holds the copied family as columns, ``norms`` their square norms.
    """

    space: Space
    tag: str
    basis: np.ndarray
    norms: np.ndarray
    mult: LinOp
    unit: StateVec
    comult: LinOp
    counit: LinOp
    orthogonal: bool

    @property
    def dim(self) -> int:
        return self.space.dim

    def unit_op(self) -> LinOp:
        return LinOp(self.unit.data.reshape(-1, 1), SCALARS, self.space)

    def identity(self) -> LinOp:
        return identity(self.space, sparse=False)


def build_algebra(family, space: Space | None = None, tag: str = "custom", require_orthogonal: bool = True, tol: float = 1e-9) -> FrobeniusAlgebra:
    """Copying Frobenius algebra of a basis ``family`` (sequence of StateVec).

    Raises
    ------
    NotOrthogonalError
        If the family is not orthogonal and ``require_orthogonal`` is set.
        With ``require_orthogonal=False`` the copying comonoid is still built,
        so the failure of the Frobenius law can be measured.
    """
    family = list(family)
    if not family:
        raise ShapeError("empty family")
    space = space or family[0].space
    B = np.column_stack([v.data for v in family])
    if B.shape != (space.dim, space.dim):
        raise ShapeError(f"{B.shape[1]} vectors do not form a basis of a {space.dim}-dimensional space")
    G = B.conj().T @ (space.gram[:, None] * B)
    norms = np.real(np.diagonal(G)).copy()
    off = G - np.diag(np.diagonal(G))
    scale = max(float(norms.max()), 1.0)
    orthogonal = opnorm_max(off) <= tol * scale
    if not orthogonal and require_orthogonal:
        raise NotOrthogonalError(f"family {tag!r} is not orthogonal: largest overlap {opnorm_max(off):.3e}")
    Binv = np.linalg.inv(B)
    d = space.dim
    copies = np.stack([np.kron(B[:, i], B[:, i]) for i in range(d)], axis=1)
    VV = tensor_space(space, space)
    comult = LinOp(copies @ Binv, space, VV)
    counit = LinOp(np.ones((1, d)) @ Binv, space, SCALARS)
    mult = dagger(comult)
    unit = StateVec(space, dagger(counit).mat[:, 0])
    return FrobeniusAlgebra(space, tag, B, norms, mult, unit, comult, counit, bool(orthogonal))


def rel_character_vector(p: MomentumPoint) -> StateVec:
    """``sqrt(2 E_p) chi_p``."""
    E = dispersion_table(p.cfg).energy(p)
    return math.sqrt(2 * E) * character_vector(p)


def rel_delta_vector(x: PositionPoint) -> StateVec:
    """``sum_p m_ir^-n (2E_p)^-1 exp(-2 pi i p.x) chi_p^rel``."""
    cfg = x.cfg
    E = dispersion_table(cfg).energies
    F = fourier_matrix(cfg)
    w = np.conj(F[:, x.index]) * np.sqrt(2 * E) / (2 * E) / cfg.m_ir**cfg.n
    return StateVec(carrier_space(cfg), w @ F)


def momentum_algebra(cfg: LatticeConfig) -> FrobeniusAlgebra:
    return build_algebra([character_vector(p) for p in all_momenta(cfg)], carrier_space(cfg), "momentum")


def position_algebra(cfg: LatticeConfig) -> FrobeniusAlgebra:
    return build_algebra([delta_vector(x) for x in all_positions(cfg)], carrier_space(cfg), "position")


def rel_momentum_algebra(cfg: LatticeConfig) -> FrobeniusAlgebra:
    return build_algebra([rel_character_vector(p) for p in all_momenta(cfg)], carrier_space(cfg), "rel-momentum")


def rel_position_algebra(cfg: LatticeConfig, require_orthogonal: bool = False) -> FrobeniusAlgebra:
    """The relativistic position family is orthogonal only when ``E_p`` is constant."""
    return build_algebra(
        [rel_delta_vector(x) for x in all_positions(cfg)],
        carrier_space(cfg),
        "rel-position",
        require_orthogonal=require_orthogonal,
    )


def standard_algebras(cfg: LatticeConfig) -> dict:
    return {
        "Z": momentum_algebra(cfg),
        "X": position_algebra(cfg),
        "Z_rel": rel_momentum_algebra(cfg),
        "X_rel": rel_position_algebra(cfg),
    }


def antipode(cfg: LatticeConfig) -> LinOp:
    """``(S f)(x) = f(-x)``; sends ``chi_p`` to ``chi_{-p}``."""
    grid = tables(cfg).grid
    M, h = cfg.M, cfg.half
    neg = np.mod(-grid + h, M)
    target = np.zeros(cfg.size, dtype=np.int64)
    for c in range(cfg.n):
        target = target * M + neg[:, c]
    S = np.zeros((cfg.size, cfg.size), dtype=complex)
    S[target, np.arange(cfg.size)] = 1.0
    V = carrier_space(cfg)
    return LinOp(S, V, V)


def cup(alg: FrobeniusAlgebra) -> LinOp:
    """``comult ∘ unit`` as a map ``C -> V⊗V``."""
    return alg.comult @ alg.unit_op()


def cap(alg: FrobeniusAlgebra) -> LinOp:
    """``counit ∘ mult`` as a map ``V⊗V -> C``."""
    return alg.counit @ alg.mult


def _report(name, alg, lhs, rhs, tol, law, **kw):
    return CheckReport.of(
        name,
        f"{ANCHOR}/{law}",
        opnorm_max(lhs.dense() - rhs.dense()),
        tol,
        details={"algebra": alg.tag, "orthogonal": alg.orthogonal, **kw},
    )


def check_associative(alg: FrobeniusAlgebra, tol: float = 1e-9) -> CheckReport:
    I = alg.identity()
    return _report(f"associative[{alg.tag}]", alg, alg.mult @ tensor(alg.mult, I), alg.mult @ tensor(I, alg.mult), tol, "associativity")


def check_unit(alg: FrobeniusAlgebra, tol: float = 1e-9) -> CheckReport:
    I = alg.identity()
    u = alg.unit_op()
    left = alg.mult @ tensor(u, I)
    right = alg.mult @ tensor(I, u)
    dev = max(opnorm_max(left.dense() - I.dense()), opnorm_max(right.dense() - I.dense()))
    return CheckReport.of(f"unit[{alg.tag}]", f"{ANCHOR}/unit", dev, tol, details={"algebra": alg.tag})


def check_commutative(alg: FrobeniusAlgebra, tol: float = 1e-9) -> CheckReport:
    return _report(f"commutative[{alg.tag}]", alg, alg.mult @ swap(alg.space, alg.space), alg.mult, tol, "commutativity")


def check_frobenius(alg: FrobeniusAlgebra, tol: float = 1e-9) -> CheckReport:
    I = alg.identity()
    mid = alg.comult @ alg.mult
    left = tensor(I, alg.mult) @ tensor(alg.comult, I)
    right = tensor(alg.mult, I) @ tensor(I, alg.comult)
    dev = max(opnorm_max(left.dense() - mid.dense()), opnorm_max(right.dense() - mid.dense()))
    return CheckReport.of(f"frobenius[{alg.tag}]", f"{ANCHOR}/frobenius-law", dev, tol, details={"algebra": alg.tag, "orthogonal": alg.orthogonal})


def check_quasi_special(alg: FrobeniusAlgebra, tol: float = 1e-9) -> CheckReport:
    """Fit ``mult ∘ comult = lam id``; the diagonal in the copied basis is reported."""
    mc = (alg.mult @ alg.comult).dense()
    lam, resid = fit_scalar(mc, np.eye(alg.dim))
    diag = np.diagonal(np.linalg.solve(alg.basis, mc @ alg.basis))
    return CheckReport.of(
        f"quasi_special[{alg.tag}]",
        f"{ANCHOR}/quasi-special",
        resid,
        tol,
        scalar=lam,
        details={"algebra": alg.tag, "diagonal": np.real_if_close(diag).tolist(), "constant": bool(resid <= tol)},
    )


def check_strong_complementarity(A: FrobeniusAlgebra, B: FrobeniusAlgebra, tol: float = 1e-9, S: LinOp | None = None) -> CheckReport:
    """Bialgebra laws between ``A``'s monoid and ``B``'s comonoid, each up to a fitted scalar.

    Laws: ``comult_B ∘ mult_A = (mult_A ⊗ mult_A)(id ⊗ swap ⊗ id)(comult_B ⊗ comult_B)``;
    ``comult_B(unit_A) = unit_A ⊗ unit_A``; ``counit_B ∘ mult_A = counit_B ⊗ counit_B``;
    and, if an antipode ``S`` is given, ``mult_A (S ⊗ id) comult_B = unit_A counit_B``.
    The reported deviation is the largest residual after fitting.
    """
    if not A.space.compatible(B.space):
        raise ShapeError("algebras on different carriers")
    V = A.space
    I = A.identity()
    laws = {}
    lhs = B.comult @ A.mult
    rhs = tensor(A.mult, A.mult) @ tensor(I, swap(V, V), I) @ tensor(B.comult, B.comult)
    laws["bialgebra"] = fit_scalar(lhs, rhs)
    uA = A.unit_op()
    laws["unit_copy"] = fit_scalar(B.comult @ uA, tensor(uA, uA))
    laws["counit_mult"] = fit_scalar(B.counit @ A.mult, tensor(B.counit, B.counit))
    if S is not None:
        laws["hopf"] = fit_scalar(A.mult @ tensor(S, I) @ B.comult, uA @ B.counit)
    dev = max(r for _, r in laws.values())
    details = {
        "monoid": A.tag,
        "comonoid": B.tag,
        "laws": {k: {"scalar": lam, "residual": r} for k, (lam, r) in laws.items()},
        "scalar_counit_unit": complex((B.counit @ uA).dense()[0, 0]),
    }
    return CheckReport.of(
        f"strong_complementarity[{A.tag},{B.tag}]",
        f"{ANCHOR}/strong-complementarity",
        dev,
        tol,
        scalar=laws["bialgebra"][0],
        details=details,
    )
