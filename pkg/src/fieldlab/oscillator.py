"""Truncated harmonic oscillator and the "equal up to tau" relations.

The oscillator keeps levels ``|0>, ..., |tau>``.  Raising the top level gives
zero, which turns the canonical commutator into ``id - (tau+1)|tau><tau|``.
Two operators are equal up to tau when their difference is supported on the
top-level corner; on a field of oscillators the corner is the all-top block of
a chosen set of factors tensored with an arbitrary remainder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, ShapeError
from .linalg import LinOp, Space, StateVec, comm
from .report import CheckReport

__all__ = [
    "Oscillator",
    "build_oscillator",
    "ladder_commutator",
    "hamiltonian_single",
    "equal_up_to_tau",
    "equal_up_to_tau_field",
    "equal_up_to_tau_local",
    "tensor_digits",
]

ANCHOR = "truncated-oscillator"


@dataclass(frozen=True, eq=False)
class Oscillator:
    tau: int
    space: Space
    a: LinOp
    a_dag: LinOp
    N: LinOp

    def level(self, n: int) -> StateVec:
        v = np.zeros(self.tau + 1, dtype=complex)
        v[n] = 1.0
        return StateVec(self.space, v)

    def top_projector(self) -> LinOp:
        P = np.zeros((self.tau + 1, self.tau + 1), dtype=complex)
        P[self.tau, self.tau] = 1.0
        return LinOp(P, self.space, self.space)

    def identity(self) -> LinOp:
        return LinOp(np.eye(self.tau + 1, dtype=complex), self.space, self.space)


def ladder_matrix(tau: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, tau + 1, dtype=float)), 1).astype(complex)


def build_oscillator(tau: int) -> Oscillator:
    if not isinstance(tau, (int, np.integer)) or tau < 1:
        raise ConfigError(f"tau must be an integer >= 1, got {tau!r}")
    space = Space.uniform(f"H_{tau}", tau + 1)
    a = ladder_matrix(tau)
    ad = a.conj().T.copy()
    N = np.diag(np.arange(tau + 1)).astype(complex)
    return Oscillator(int(tau), space, LinOp(a, space, space), LinOp(ad, space, space), LinOp(N, space, space))


def ladder_commutator(osc: Oscillator) -> LinOp:
    return comm(osc.a, osc.a_dag)


def hamiltonian_single(osc: Oscillator, E) -> LinOp:
    if E < 0:
        raise ConfigError("energy must be nonnegative")
    return float(E) * osc.N


def equal_up_to_tau(f: LinOp, g: LinOp, osc: Oscillator, tol: float = 1e-12, name: str = "equal_up_to_tau") -> CheckReport:
    """Check ``f - g = c |tau><tau|``; the scalar ``c`` is read off the corner entry."""
    D = (f - g).dense()
    t = osc.tau
    if D.shape != (t + 1, t + 1):
        raise ShapeError(f"expected ({t + 1}, {t + 1}) operators, got {D.shape}")
    c = complex(D[t, t])
    rest = D.copy()
    rest[t, t] = 0
    dev = float(np.abs(rest).max())
    return CheckReport.of(name, ANCHOR + "/equal-up-to-tau", dev, tol, tau_scalar=c)


def tensor_digits(n_factors: int, tau: int) -> np.ndarray:
    """Oscillator levels of every basis state of ``H^{⊗n}``, row-major."""
    shape = (tau + 1,) * n_factors
    return np.indices(shape).reshape(n_factors, -1).T.copy()


def _difference_coo(f, g, digits, ctrl):
    D = (f - g).sparse().tocoo()
    k_dim, g_dim = ctrl
    n_rows, n_cols = digits.shape[0] * k_dim, digits.shape[0] * g_dim
    if D.shape != (n_rows, n_cols):
        raise ShapeError(f"difference has shape {D.shape}, decomposition expects {(n_rows, n_cols)}")
    keep = np.abs(D.data) > 0
    return D, D.row[keep], D.col[keep], D.data[keep]


def _column_filter(cols, columns):
    if columns is None:
        return np.ones(cols.shape[0], dtype=bool)
    return np.asarray(columns, dtype=bool)[cols]


def equal_up_to_tau_field(
    f: LinOp,
    g: LinOp,
    digits: np.ndarray,
    tau: int,
    x_factors,
    ctrl=(1, 1),
    columns=None,
    tol: float = 1e-9,
    name: str = "equal_up_to_tau_field",
) -> CheckReport:
    """Check ``f - g = (|tau><tau|)^{⊗X} ⊗ h`` for some ``h``.

    Parameters
    ----------
    digits : (dim, L) int array
        Oscillator levels of each field basis state.  Rows and columns of the
        operators are ``field_index * ctrl_dim + ctrl_index``.
    x_factors : sequence of int
        Which of the ``L`` oscillator factors form ``X``.
    ctrl : (out_dim, in_dim)
        Dimensions of the trailing non-oscillator factors.
    columns : bool mask, optional
        Restrict the check to these domain columns (used for truncated
        operators).

    The extracted ``h`` is the restriction of the difference to basis states
    whose ``X`` factors sit at level ``tau``.  When ``h`` is a multiple of the
    identity the multiple is reported as ``tau_scalar``.
    """
    X = np.atleast_1d(np.asarray(x_factors, dtype=int))
    D, r, c, v = _difference_coo(f, g, digits, ctrl)
    k_dim, g_dim = ctrl
    top = np.all(digits[:, X] == tau, axis=1)
    ok = top[r // k_dim] & top[c // g_dim]
    sel = _column_filter(c, columns)
    bad = v[sel & ~ok]
    dev = float(np.abs(bad).max()) if bad.size else 0.0

    S = np.flatnonzero(top)
    rows = (S[:, None] * k_dim + np.arange(k_dim)).reshape(-1)
    cols = (S[:, None] * g_dim + np.arange(g_dim)).reshape(-1)
    h = D.tocsr()[rows][:, cols]
    details = {"x_factors": X.tolist(), "h_shape": list(h.shape)}
    tau_scalar = None
    if h.shape[0] == h.shape[1] and h.shape[0] > 0:
        colmask = np.ones(h.shape[1], bool) if columns is None else np.asarray(columns, bool)[cols]
        hd = h.toarray()
        diag = np.diagonal(hd)[colmask]
        lam = complex(diag.mean()) if diag.size else 0j
        off = (hd - lam * np.eye(h.shape[0]))[:, colmask]
        resid = float(np.abs(off).max()) if off.size else 0.0
        details["h_is_scalar"] = resid <= tol
        details["h_scalar_residual"] = resid
        if resid <= tol:
            tau_scalar = lam
    if columns is not None:
        details["checked_columns"] = int(np.count_nonzero(columns))
    return CheckReport.of(name, ANCHOR + "/equal-up-to-tau-field", dev, tol, tau_scalar=tau_scalar, details=details)


def equal_up_to_tau_local(
    f: LinOp,
    g: LinOp,
    digits: np.ndarray,
    tau: int,
    ctrl=(1, 1),
    columns=None,
    tol: float = 1e-9,
    name: str = "equal_up_to_tau_local",
    corner_basis=None,
) -> CheckReport:
    """Check ``f - g = sum_s (|tau><tau|)_s ⊗ h_s`` over single factors ``s``.

    Lattice sums of single-site commutators leave one top-level corner per
    site; no single choice of ``X`` covers all of them at once.  An entry is
    allowed exactly when some factor sits at level ``tau`` in both its row and
    its column state.

    If ``corner_basis`` is given as a list of operators ``B_s`` (one per site,
    each supported on site ``s``'s corner), the difference is also fitted as
    ``lam * sum_s B_s`` and ``lam`` reported as ``tau_scalar``.
    """
    D, r, c, v = _difference_coo(f, g, digits, ctrl)
    k_dim, g_dim = ctrl
    at_top = digits == tau
    ok = np.any(at_top[r // k_dim] & at_top[c // g_dim], axis=1)
    sel = _column_filter(c, columns)
    bad = v[sel & ~ok]
    dev = float(np.abs(bad).max()) if bad.size else 0.0
    details = {"corner_entries": int(np.count_nonzero(ok & sel))}
    tau_scalar = None
    if corner_basis is not None:
        B = corner_basis
        Bm = B.sparse() if isinstance(B, LinOp) else sp.csr_array(B)
        Dm = D.tocsr()
        if columns is not None:
            keep = sp.diags_array(np.asarray(columns, dtype=float))
            Bm = Bm @ keep
            Dm = Dm @ keep
        bb = (Bm.conj().multiply(Bm)).sum()
        if abs(bb) > 0:
            tau_scalar = complex((Bm.conj().multiply(Dm)).sum() / bb)
            details["corner_fit_residual"] = float(np.abs((Dm - tau_scalar * Bm).toarray()).max())
    return CheckReport.of(name, ANCHOR + "/equal-up-to-tau-local", dev, tol, tau_scalar=tau_scalar, details=details)
