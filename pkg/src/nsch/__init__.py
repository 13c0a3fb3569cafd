"""Pseudo-spectral simulation and verification harness for the coupled
incompressible Navier-Stokes / Cahn-Hilliard system on the 2-D torus with
the logarithmic (Flory-Huggins type) free-energy density."""

from .potential import ClampTally, PotentialParams
from .spectral import Grid, ScalarField, VectorField

__all__ = ["Grid", "ScalarField", "VectorField", "PotentialParams", "ClampTally"]

__version__ = "0.1.0"
