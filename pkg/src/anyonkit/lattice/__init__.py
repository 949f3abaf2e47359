"""Exact state-vector model of group-valued spins on small closed lattices."""

from .geometry import GenericLattice, parse_lattice, reverse_edge, tetrahedron, torus_lattice
from .operators import LatticeSpace, Monomial
from .ribbons import MalformedRibbon, Ribbon, enumerate_ribbons, ribbon_closed_form, ribbon_operators

__all__ = ["GenericLattice", "LatticeSpace", "MalformedRibbon", "Monomial", "Ribbon",
           "enumerate_ribbons", "parse_lattice", "reverse_edge", "ribbon_closed_form",
           "ribbon_operators", "tetrahedron", "torus_lattice"]
