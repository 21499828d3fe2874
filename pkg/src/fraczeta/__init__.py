"""Desk-scale numerical laboratory.

Subpackages: fracdyn (fractional Cole-Cole dynamics), zetalab (Riemann
zeta numerics and zero statistics), eprspace (prime-exponent lattice),
loopgas (lattice Feynman-Kac), fitkit (impedance fitting), cli (batch
front door).
"""

__version__ = "0.1.0"
