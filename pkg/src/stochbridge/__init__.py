"""Stochastic radiation kinetics, emitter optics and persistent-walk wave equations.

Submodules
----------
kinetics   probability-to-rate matter/radiation kinetics and Planck equilibrium
emitter    two-level emitter: golden-rule rates, Lindblad evolution, Purcell, lineshapes
kac        persistent (Kac) random walk, telegrapher and diffusion solvers
nelson     Schroedinger solver and Nelson drift-diffusion sampling
chiral     1+1 Dirac split-step and chiral persistent walk
cli        experiment runner (``stochbridge run|validate|list``)
"""

__version__ = "0.1.0"

# submodules imported on demand

__all__ = ["__version__"]
