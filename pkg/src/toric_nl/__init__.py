"""Toric hypersurfaces: class groups, Jacobian rings, Hodge numbers and the
infinitesimal Noether-Lefschetz test for very general members."""

__version__ = "0.1.0"
