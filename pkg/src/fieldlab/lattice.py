"""Finite cyclic lattice with dual meshes for momentum and position.

Points are stored as integer vectors with components in ``-(M-1)/2 .. (M-1)/2``.
A momentum point ``k`` sits at ``p = k / m_ir``, a position point ``j`` at
``x = j / m_uv``, so ``p . x = (k . j) / M`` and every character value is an
exact ``M``-th root of unity looked up from a table.

Vectors of the group algebra are represented as functions on the position
lattice with inner product weight ``1 / m_uv**n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import ConfigError
from .linalg import Space, StateVec, inner, root_of_unity

__all__ = [
    "LatticeConfig",
    "MomentumPoint",
    "PositionPoint",
    "all_momenta",
    "all_positions",
    "character",
    "inner",
    "carrier_space",
    "character_vector",
    "delta_vector",
    "fourier_matrix",
    "parse_fraction",
]


def parse_fraction(value) -> Fraction:
    """Accept ``Fraction``, ``int`` or a ``"num/den"`` string; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"not a rational: {value!r}") from exc
    raise ConfigError(f"rational expected as 'num/den' string, got {value!r}")


@dataclass(frozen=True)
class LatticeConfig:
    """Finite parameters for the whole construction.

    Parameters
    ----------
    n : int
        Spatial dimension.
    m_ir, m_uv : int
        Odd positive integers; the lattice has ``M = m_ir * m_uv`` points per axis.
    mass : Fraction or str
        Mass on the ``1/m_ir`` grid, e.g. ``"4/5"`` with ``m_ir = 5``.
    tau : int
        Oscillator cutoff, at least 1.
    tol : float
        Default absolute comparison tolerance.
    """

    n: int = 1
    m_ir: int = 3
    m_uv: int = 3
    mass: Fraction = Fraction(1)
    tau: int = 2
    tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "mass", parse_fraction(self.mass))
        for name in ("n", "m_ir", "m_uv", "tau"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        for name in ("m_ir", "m_uv"):
            v = getattr(self, name)
            if v < 1 or v % 2 == 0:
                raise ConfigError(f"{name} must be an odd positive integer, got {v}")
        if self.tau < 1:
            raise ConfigError(f"tau must be >= 1, got {self.tau}")
        scaled = self.mass * self.m_ir
        if scaled.denominator != 1 or scaled < 0:
            raise ConfigError(f"mass {self.mass} is not a nonnegative multiple of 1/{self.m_ir}")
        if not self.tol >= 0:
            raise ConfigError("tol must be nonnegative")

    @property
    def M(self) -> int:
        return self.m_ir * self.m_uv

    @property
    def half(self) -> int:
        return (self.M - 1) // 2

    @property
    def size(self) -> int:
        """Number of lattice points, ``M**n``."""
        return self.M**self.n

    @property
    def mass_units(self) -> int:
        """``mass * m_ir`` as an integer."""
        return int(self.mass * self.m_ir)

    def snapshot(self) -> dict:
        return {
            "n": self.n,
            "m_ir": self.m_ir,
            "m_uv": self.m_uv,
            "M": self.M,
            "mass": str(self.mass),
            "tau": self.tau,
            "tol": self.tol,
        }

    def with_(self, **changes) -> "LatticeConfig":
        d = {k: getattr(self, k) for k in ("n", "m_ir", "m_uv", "mass", "tau", "tol")}
        d.update(changes)
        return LatticeConfig(**d)

    def time_config(self) -> "LatticeConfig":
        """The one-dimensional lattice used for time."""
        return self.with_(n=1)


def _wrap(v, M):
    h = (M - 1) // 2
    return tuple(int((c + h) % M - h) for c in v)


@dataclass(frozen=True)
class _Point:
    idx: tuple
    cfg: LatticeConfig = field(repr=False)

    def __post_init__(self):
        idx = tuple(int(c) for c in self.idx)
        if len(idx) != self.cfg.n:
            raise ConfigError(f"point {idx} has wrong dimension for n={self.cfg.n}")
        h = self.cfg.half
        if any(abs(c) > h for c in idx):
            raise ConfigError(f"point {idx} outside -{h}..{h}")
        object.__setattr__(self, "idx", idx)

    def _same(self, other):
        if type(other) is not type(self) or other.cfg != self.cfg:
            raise ConfigError("points from different configurations")

    def __add__(self, other):
        self._same(other)
        return type(self)(_wrap(np.add(self.idx, other.idx), self.cfg.M), self.cfg)

    def __neg__(self):
        return type(self)(_wrap(np.negative(self.idx), self.cfg.M), self.cfg)

    def __sub__(self, other):
        return self + (-other)

    @property
    def index(self) -> int:
        """Row-major position in the lexicographic enumeration."""
        h, M = self.cfg.half, self.cfg.M
        out = 0
        for c in self.idx:
            out = out * M + (c + h)
        return out

    def is_zero(self) -> bool:
        return not any(self.idx)


class MomentumPoint(_Point):
    """Momentum ``p = k / m_ir``."""

    @property
    def k(self) -> tuple:
        return self.idx

    @property
    def value(self) -> tuple:
        return tuple(Fraction(c, self.cfg.m_ir) for c in self.idx)


class PositionPoint(_Point):
    """Position ``x = j / m_uv``."""

    @property
    def j(self) -> tuple:
        return self.idx

    @property
    def value(self) -> tuple:
        return tuple(Fraction(c, self.cfg.m_uv) for c in self.idx)


def _grid(cfg):
    h = cfg.half
    return itertools.product(range(-h, h + 1), repeat=cfg.n)


def all_momenta(cfg: LatticeConfig) -> list:
    return [MomentumPoint(k, cfg) for k in _grid(cfg)]


def all_positions(cfg: LatticeConfig) -> list:
    return [PositionPoint(j, cfg) for j in _grid(cfg)]


def character(p: MomentumPoint, x: PositionPoint) -> complex:
    """``exp(2 pi i p . x)`` as an exact ``M``-th root of unity."""
    if not isinstance(p, MomentumPoint) or not isinstance(x, PositionPoint):
        raise ConfigError("character takes a momentum point and a position point")
    if p.cfg != x.cfg:
        raise ConfigError("momentum and position points from different configurations")
    return complex(root_of_unity(int(np.dot(p.k, x.j)), p.cfg.M))


class _Tables:
    """Integer index tables shared by the vector builders."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.grid = np.array(list(_grid(cfg)), dtype=np.int64).reshape(-1, cfg.n)

    @cached_property
    def pairing(self) -> np.ndarray:
        """``k . j mod M`` for every (momentum row, position column)."""
        return np.mod(self.grid @ self.grid.T, self.cfg.M)


_TABLES: dict = {}


def tables(cfg: LatticeConfig) -> _Tables:
    t = _TABLES.get(cfg)
    if t is None:
        t = _TABLES[cfg] = _Tables(cfg)
    return t


def carrier_space(cfg: LatticeConfig) -> Space:
    """The group algebra as functions on positions, weight ``1 / m_uv**n``."""
    return Space.uniform(f"C[Z_{cfg.M}^{cfg.n}]", cfg.size, Fraction(1, cfg.m_uv**cfg.n))


def fourier_matrix(cfg: LatticeConfig) -> np.ndarray:
    """``F[p, x] = exp(2 pi i p . x)`` with rows and columns in lexicographic order."""
    return root_of_unity(tables(cfg).pairing, cfg.M)


def character_vector(p: MomentumPoint) -> StateVec:
    """The momentum eigenstate ``x -> exp(2 pi i p . x)``; square norm ``m_ir**n``."""
    cfg = p.cfg
    return StateVec(carrier_space(cfg), fourier_matrix(cfg)[p.index])


def delta_vector(x: PositionPoint) -> StateVec:
    """The position eigenstate; square norm ``m_uv**n``.

    Equals ``sum_p m_ir**-n exp(-2 pi i p . x) chi_p``, which evaluates to
    ``m_uv**n`` at ``x`` and zero elsewhere.
    """
    cfg = x.cfg
    data = np.zeros(cfg.size, dtype=complex)
    data[x.index] = cfg.m_uv**cfg.n
    return StateVec(carrier_space(cfg), data)
