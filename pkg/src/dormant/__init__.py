"""Exact differential algebra on explicit curves in characteristic p.

Layers, bottom to top: `field` (prime fields, polynomials, rational
functions, truncated series), `curves` (marked lines, Weierstrass
cubics, one-point plane curves, divisors and branches), `connections`
(logarithmic connections and p-curvature), `cartier` (the Cartier
operator and the pre-Tango test), `tango` (certificates and invariant
bounds), `miura` (rank-2 opers and the dormancy bridge), `moduli`
(brute-force enumeration), `surface` (glued fibered surfaces), and
`cli` (the job file format and command front end).
"""
from __future__ import annotations

__version__ = "0.1.0"

__all__ = [
    "cartier",
    "cli",
    "connections",
    "curves",
    "errors",
    "field",
    "miura",
    "moduli",
    "surface",
    "tango",
]
