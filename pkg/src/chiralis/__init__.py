"""Exact-arithmetic calculator for vertex algebras, lambda brackets,
homotopy Lie structures, chiral algebroids, and chiralized Koszul
cohomology.  All computations are over the rationals and every reported
identity is checked by decidable equality of canonical forms."""

__version__ = "0.1.0"
