"""Exhaustive desk-scale verification of the arithmetic and geometric
constructions behind finiteness certificates for the groups
G_w = Z[w, 1/w] semidirect Z."""

__version__ = "0.1.0"
