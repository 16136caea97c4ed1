"""Floor-quantised relativistic dispersion on the momentum lattice.

``E_p = floor(m_ir * sqrt(|p|^2 + m^2)) / m_ir`` with ``c = 1``.  With
``p = k / m_ir`` and ``m = mu / m_ir`` this is ``isqrt(|k|^2 + mu^2) / m_ir``,
computed in integers.  Energies then sit on the ``1/m_ir`` grid, and with
``t = j / m_uv`` every phase ``E_p t = units * j / M`` is an ``M``-th root of
unity.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConfigError, ZeroEnergyModeError
from .lattice import LatticeConfig, MomentumPoint, all_momenta

__all__ = ["Dispersion", "dispersion_table"]


@dataclass(frozen=True, eq=False)
class Dispersion:
    """Energy table over the lattice momenta in lexicographic order.

    ``units[i]`` is ``m_ir * E`` for the ``i``-th momentum, an integer.
    """

    cfg: LatticeConfig
    units: np.ndarray

    def energy(self, p: MomentumPoint) -> Fraction:
        if p.cfg != self.cfg:
            raise ConfigError("momentum from a different configuration")
        return Fraction(int(self.units[p.index]), self.cfg.m_ir)

    def unit(self, p: MomentumPoint) -> int:
        return int(self.units[p.index])

    @property
    def energies(self) -> np.ndarray:
        return self.units / self.cfg.m_ir

    @property
    def has_zero_mode(self) -> bool:
        return bool(np.any(self.units == 0))

    def levels(self) -> dict:
        """Degeneracy histogram: energy -> number of lattice momenta at that energy."""
        c = Counter(int(u) for u in self.units)
        return {Fraction(u, self.cfg.m_ir): c[u] for u in sorted(c)}

    def degeneracy(self, p: MomentumPoint) -> int:
        return int(np.count_nonzero(self.units == self.units[p.index]))

    def unquantised(self, p: MomentumPoint) -> float:
        """The exact relativistic value before flooring, for comparison."""
        m = float(self.cfg.mass)
        return math.sqrt(sum(float(v) ** 2 for v in p.value) + m * m)


@lru_cache(maxsize=64)
def _units(cfg: LatticeConfig) -> np.ndarray:
    mu2 = cfg.mass_units**2
    u = np.array([math.isqrt(sum(c * c for c in p.k) + mu2) for p in all_momenta(cfg)], dtype=np.int64)
    u.setflags(write=False)
    return u


def dispersion_table(cfg: LatticeConfig, allow_zero_modes: bool = False) -> Dispersion:
    """Build the table; a zero-energy mode is refused unless ``allow_zero_modes``."""
    scaled = cfg.mass * cfg.m_ir
    if scaled.denominator != 1:
        raise ConfigError(f"mass {cfg.mass} is not on the 1/{cfg.m_ir} grid")
    disp = Dispersion(cfg, _units(cfg))
    if disp.has_zero_mode and not allow_zero_modes:
        raise ZeroEnergyModeError(
            "zero-energy mode at p = 0: the 1/(2E_p) measure is undefined for a massless field"
        )
    return disp
