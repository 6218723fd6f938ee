"""Numerical laboratory for sharp Poincare-Sobolev analysis on the hyperbolic ball.

Subpackages:
    geometry    Poincare-ball primitives (Mobius maps, distances, volumes)
    grids       radial/frequency quadrature grids and profiles
    spectral    radial spherical-function transforms and multipliers
    kernels     factorization roots and inverse-operator kernels
    rearrange   hyperbolic decreasing rearrangement and its bilinear test
    solver      radial discretization and extremal computation
    constants   flat-space sharp constants and the hyperbolic comparison
    cli         command-line interface (solve / verify / constants / ...)
"""

__version__ = "0.1.0"

