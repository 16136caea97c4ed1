"""Finite-lattice real scalar field built from truncated harmonic oscillators."""

__version__ = "0.1.0"
