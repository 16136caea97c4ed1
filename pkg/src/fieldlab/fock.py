"""Field of truncated oscillators over the momentum lattice.

Two backends share one implementation.  Basis states are occupation tuples
``n(p) in 0..tau`` over the lattice sites in lexicographic order, identified
by their row-major mixed-radix code:

``dense``
    every tuple, i.e. the full tensor product of dimension ``(tau+1)**(M**n)``;
    exact including every top-level corner.
``sparse``
    only tuples with total occupation at most ``n_max``.  Raising out of that
    sector annihilates the state and marks the column as lost on the
    resulting operator (see :mod:`fieldlab.linalg`).

Operators are stored as CSR matrices in both cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .dispersion import Dispersion, dispersion_table
from .errors import ConfigError, ShapeError
from .lattice import (
    LatticeConfig,
    MomentumPoint,
    PositionPoint,
    all_momenta,
    tables,
)
from .linalg import LinOp, Space, StateVec, root_of_unity
from .oscillator import equal_up_to_tau_field, equal_up_to_tau_local, tensor_digits

__all__ = [
    "DENSE_CAP",
    "FockSpace",
    "OccupationState",
    "vacuum",
    "site_ladder",
    "rescaled_ladder",
    "rel_ladder",
    "one_particle",
    "one_particle_rel",
    "field_phi",
    "field_pi",
    "number_operator",
    "hamiltonian",
    "coarse_grain_occupation",
]

DENSE_CAP = 65536
LOWER, RAISE = "lower", "raise"


@dataclass(frozen=True)
class OccupationState:
    """A basis state ``|n>`` with an amplitude; ``occupations`` lists nonzero sites only."""

    occupations: dict = field(default_factory=dict)
    amplitude: complex = 1.0

    def total(self) -> int:
        return sum(self.occupations.values())

    def __hash__(self):
        return hash((tuple(sorted((p.k, n) for p, n in self.occupations.items())), self.amplitude))


def _compositions(S, tau, budget):
    """All tuples of length S with entries 0..tau and sum <= budget, lexicographic."""
    out = []
    cur = [0] * S

    def rec(i, left):
        if i == S:
            out.append(tuple(cur))
            return
        for v in range(0, min(tau, left) + 1):
            cur[i] = v
            rec(i + 1, left - v)
        cur[i] = 0

    rec(0, budget)
    return np.array(out, dtype=np.int64).reshape(-1, S)


class FockSpace:
    """Occupation-number space over the momentum lattice.

    Parameters
    ----------
    cfg : LatticeConfig
    backend : {"dense", "sparse"}
    n_max : int, optional
        Total-occupation cutoff, required for ``sparse``.
    max_dim : int
        Refuse a dense space larger than this.
    """

    def __init__(self, cfg: LatticeConfig, backend: str = "dense", n_max=None, max_dim: int = DENSE_CAP):
        if backend not in ("dense", "sparse"):
            raise ConfigError(f"unknown backend {backend!r}")
        self.cfg = cfg
        self.backend = backend
        self.sites = all_momenta(cfg)
        S = len(self.sites)
        tau = cfg.tau
        radix = tau + 1
        if radix**S >= 2**62:
            raise ConfigError(f"{S} sites at tau={tau} exceed the 62-bit basis code range")
        if backend == "dense":
            dim = radix**S
            if dim > max_dim:
                raise ConfigError(
                    f"dense Fock dimension {dim} = {radix}^{S} exceeds the cap {max_dim}; use the sparse backend"
                )
            occ = tensor_digits(S, tau)
            self.n_max = S * tau
        else:
            if n_max is None or int(n_max) < 0:
                raise ConfigError("sparse backend needs a nonnegative n_max")
            self.n_max = int(n_max)
            occ = _compositions(S, tau, self.n_max)
        self._step = radix ** np.arange(S - 1, -1, -1, dtype=np.int64)
        codes = occ @ self._step
        order = np.argsort(codes, kind="stable")
        self.occupations = occ[order]
        self.occupations.setflags(write=False)
        self.codes = codes[order]
        self.totals = self.occupations.sum(axis=1)
        self.space = Space.uniform(f"F[{backend},M={cfg.M},n={cfg.n},tau={tau}]", self.occupations.shape[0])
        self._cache: dict = {}

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dispersion(self) -> Dispersion:
        d = self._cache.get("dispersion")
        if d is None:
            d = self._cache["dispersion"] = dispersion_table(self.cfg)
        return d

    def __repr__(self) -> str:
        cut = f", n_max={self.n_max}" if self.backend == "sparse" else ""
        return f"FockSpace(M={self.cfg.M}, n={self.cfg.n}, tau={self.cfg.tau}, {self.backend}{cut}, dim={self.dim})"

    def site_index(self, p: MomentumPoint) -> int:
        if not isinstance(p, MomentumPoint) or p.cfg != self.cfg:
            raise ConfigError(f"unknown site {p!r}")
        return p.index

    def index_of(self, occ) -> int:
        """Basis index of an occupation tuple (over all sites); ``-1`` if outside the basis."""
        code = int(np.dot(np.asarray(occ, dtype=np.int64), self._step))
        pos = int(np.searchsorted(self.codes, code))
        if pos < self.dim and self.codes[pos] == code:
            return pos
        return -1

    def _tuple(self, occ: OccupationState):
        t = np.zeros(self.n_sites, dtype=np.int64)
        for p, n in occ.occupations.items():
            if not 0 <= n <= self.cfg.tau:
                raise ConfigError(f"occupation {n} outside 0..{self.cfg.tau}")
            t[self.site_index(p)] = n
        return t

    def state(self, occ: OccupationState) -> StateVec:
        i = self.index_of(self._tuple(occ))
        if i < 0:
            raise ConfigError(f"occupation total {occ.total()} exceeds n_max={self.n_max}")
        data = np.zeros(self.dim, dtype=complex)
        data[i] = occ.amplitude
        return StateVec(self.space, data)

    def decompose(self, v: StateVec, tol: float = 0.0) -> list:
        """Nonzero components of ``v`` as occupation states, in basis order."""
        out = []
        for i in np.flatnonzero(np.abs(v.data) > tol):
            occ = {self.sites[s]: int(n) for s, n in enumerate(self.occupations[i]) if n}
            out.append(OccupationState(occ, complex(v.data[i])))
        return out

    def embed(self, v: StateVec, other: "FockSpace") -> StateVec:
        """Re-express ``v`` in the basis of ``other`` (same lattice); components missing there are dropped."""
        if other.cfg != self.cfg:
            raise ConfigError("different lattices")
        data = np.zeros(other.dim, dtype=complex)
        pos = np.searchsorted(other.codes, self.codes)
        pos_c = np.minimum(pos, other.dim - 1)
        hit = other.codes[pos_c] == self.codes
        data[pos_c[hit]] = v.data[hit]
        return StateVec(other.space, data, v.truncated)

    def identity(self) -> LinOp:
        return LinOp(sp.eye_array(self.dim, dtype=complex, format="csr"), self.space, self.space)

    def diagonal(self, values) -> LinOp:
        return LinOp(sp.diags_array(np.asarray(values, dtype=complex)).tocsr(), self.space, self.space)

    def valid_columns(self, *ops, ctrl_dim: int = 1) -> np.ndarray:
        """Domain columns on which none of ``ops`` was truncated."""
        bad = np.zeros(self.dim * ctrl_dim, dtype=bool)
        for op in ops:
            if op.lost is not None:
                bad |= op.lost
        return ~bad

    def equal_up_to_tau(self, f: LinOp, g: LinOp, sites, ctrl=(1, 1), tol=None, name="equal_up_to_tau_field"):
        """``f - g = (|tau><tau|)^{⊗sites} ⊗ h``; truncated columns are excluded."""
        x = [self.site_index(p) for p in sites]
        cols = _columns(self, f, g, ctrl)
        tol = self.cfg.tol if tol is None else tol
        r = equal_up_to_tau_field(f, g, self.occupations, self.cfg.tau, x, ctrl=ctrl, columns=cols, tol=tol, name=name)
        r.backend = self.backend
        r.config = self.snapshot()
        return r

    def equal_up_to_tau_local(self, f: LinOp, g: LinOp, ctrl=(1, 1), tol=None, name="equal_up_to_tau_local", corner_basis=None):
        cols = _columns(self, f, g, ctrl)
        tol = self.cfg.tol if tol is None else tol
        r = equal_up_to_tau_local(
            f, g, self.occupations, self.cfg.tau, ctrl=ctrl, columns=cols, tol=tol, name=name, corner_basis=corner_basis
        )
        r.backend = self.backend
        r.config = self.snapshot()
        return r

    def top_projector(self, p: MomentumPoint) -> LinOp:
        """``|tau><tau|`` on site ``p`` tensored with the identity elsewhere."""
        s = self.site_index(p)
        return self.diagonal((self.occupations[:, s] == self.cfg.tau).astype(float))

    def snapshot(self) -> dict:
        d = self.cfg.snapshot()
        d["backend"] = self.backend
        if self.backend == "sparse":
            d["n_max"] = self.n_max
        d["dim"] = self.dim
        return d


def _columns(fs, f, g, ctrl):
    if f.lost is None and g.lost is None:
        return None
    return fs.valid_columns(f, g, ctrl_dim=ctrl[1])


def vacuum(fs: FockSpace) -> StateVec:
    data = np.zeros(fs.dim, dtype=complex)
    data[0] = 1.0
    return StateVec(fs.space, data)


def site_ladder(fs: FockSpace, p: MomentumPoint, kind: str) -> LinOp:
    """``a_p`` (``kind="lower"``) or ``a_p^dagger`` (``kind="raise"``) on one site."""
    if kind not in (LOWER, RAISE):
        raise ConfigError(f"kind must be 'lower' or 'raise', got {kind!r}")
    s = fs.site_index(p)
    key = ("site", s, kind)
    op = fs._cache.get(key)
    if op is not None:
        return op
    occ = fs.occupations[:, s]
    step = fs._step[s]
    lost = None
    if kind == LOWER:
        src = np.flatnonzero(occ > 0)
        tgt = np.searchsorted(fs.codes, fs.codes[src] - step)
        vals = np.sqrt(occ[src].astype(float))
    else:
        cand = np.flatnonzero(occ < fs.cfg.tau)
        want = fs.codes[cand] + step
        pos = np.minimum(np.searchsorted(fs.codes, want), fs.dim - 1)
        hit = fs.codes[pos] == want
        src, tgt = cand[hit], pos[hit]
        vals = np.sqrt(occ[src].astype(float) + 1.0)
        if not hit.all():
            lost = np.zeros(fs.dim, dtype=bool)
            lost[cand[~hit]] = True
    mat = sp.csr_array((vals.astype(complex), (tgt, src)), shape=(fs.dim, fs.dim))
    op = LinOp(mat, fs.space, fs.space, lost)
    fs._cache[key] = op
    return op


def rescaled_ladder(fs: FockSpace, p: MomentumPoint, kind: str) -> LinOp:
    """``a(p) = sqrt(m_ir**n) a_p`` and its raising partner."""
    return math.sqrt(fs.cfg.m_ir**fs.cfg.n) * site_ladder(fs, p, kind)


def rel_ladder(fs: FockSpace, p: MomentumPoint, kind: str) -> LinOp:
    """Relativistically normalised ``sqrt(2 E_p) a(p)``."""
    E = fs.dispersion.energy(p)
    return math.sqrt(2 * E) * rescaled_ladder(fs, p, kind)


def one_particle(fs: FockSpace, p: MomentumPoint) -> StateVec:
    return rescaled_ladder(fs, p, RAISE) @ vacuum(fs)


def one_particle_rel(fs: FockSpace, p: MomentumPoint) -> StateVec:
    return rel_ladder(fs, p, RAISE) @ vacuum(fs)


def _lattice_sum(fs, terms):
    acc = None
    lost = None
    for coef, op in terms:
        m = coef * op.mat
        acc = m if acc is None else acc + m
        if op.lost is not None:
            lost = op.lost.copy() if lost is None else lost | op.lost
    return LinOp(acc.tocsr(), fs.space, fs.space, lost)


def _phases(fs, x: PositionPoint):
    if x.cfg != fs.cfg:
        raise ConfigError("position from a different configuration")
    return root_of_unity(tables(fs.cfg).pairing[:, x.index], fs.cfg.M)


def field_phi(fs: FockSpace, x: PositionPoint) -> LinOp:
    """``sum_p m_ir^-n (2E_p)^-1/2 [a(p) e^{2 pi i p.x} + a^dag(p) e^{-2 pi i p.x}]``."""
    ph = _phases(fs, x)
    vol = 1.0 / fs.cfg.m_ir**fs.cfg.n
    E = fs.dispersion.energies
    terms = []
    for i, p in enumerate(fs.sites):
        c = vol / math.sqrt(2 * E[i])
        terms.append((c * ph[i], rescaled_ladder(fs, p, LOWER)))
        terms.append((c * np.conj(ph[i]), rescaled_ladder(fs, p, RAISE)))
    return _lattice_sum(fs, terms)


def field_pi(fs: FockSpace, x: PositionPoint) -> LinOp:
    """Conjugate momentum with the prefactor ``(-i) sqrt(E_p) / 2`` per mode."""
    ph = _phases(fs, x)
    vol = 1.0 / fs.cfg.m_ir**fs.cfg.n
    E = fs.dispersion.energies
    terms = []
    for i, p in enumerate(fs.sites):
        c = vol * (-1j) * math.sqrt(E[i]) / 2
        terms.append((c * ph[i], rescaled_ladder(fs, p, LOWER)))
        terms.append((-c * np.conj(ph[i]), rescaled_ladder(fs, p, RAISE)))
    return _lattice_sum(fs, terms)


def number_operator(fs: FockSpace) -> LinOp:
    return fs.diagonal(fs.totals.astype(float))


def hamiltonian(fs: FockSpace) -> LinOp:
    return fs.diagonal(fs.occupations @ fs.dispersion.energies)


def number_operator_sum(fs: FockSpace) -> LinOp:
    """``sum_p m_ir^-n a^dag(p) a(p)`` assembled from ladder products."""
    vol = 1.0 / fs.cfg.m_ir**fs.cfg.n
    return _lattice_sum(fs, [(vol, rescaled_ladder(fs, p, RAISE) @ rescaled_ladder(fs, p, LOWER)) for p in fs.sites])


def hamiltonian_sum(fs: FockSpace) -> LinOp:
    vol = 1.0 / fs.cfg.m_ir**fs.cfg.n
    E = fs.dispersion.energies
    return _lattice_sum(
        fs, [(vol * E[i], rescaled_ladder(fs, p, RAISE) @ rescaled_ladder(fs, p, LOWER)) for i, p in enumerate(fs.sites)]
    )


def coarse_grain_occupation(occ: OccupationState, bins: dict) -> dict:
    """Sum occupations over each bin of a partition of the momentum lattice.

    ``bins`` maps a label to an iterable of momentum points; every lattice
    point must appear in exactly one bin.
    """
    seen = {}
    cfg = None
    for label, pts in bins.items():
        for p in pts:
            if p in seen:
                raise ConfigError(f"momentum {p.k} appears in bins {seen[p]!r} and {label!r}")
            seen[p] = label
            cfg = p.cfg
    if cfg is None:
        raise ConfigError("empty partition")
    missing = [p.k for p in all_momenta(cfg) if p not in seen]
    if missing:
        raise ConfigError(f"bins do not cover momenta {missing[:5]}")
    out = {label: 0 for label in bins}
    for p, n in occ.occupations.items():
        if p not in seen:
            raise ShapeError(f"occupied momentum {p.k} not in the binned lattice")
        out[seen[p]] += n
    return out


def energy_fraction(fs: FockSpace, p: MomentumPoint) -> Fraction:
    return fs.dispersion.energy(p)
