"""Toric codes and quantum-double anyons: tensors, lattices, decoders and a small anyon VM."""

__version__ = "0.1.0"
