"""Jacobian non-degeneracy and normal-bundle computations for rational curves on quintic threefolds."""

__version__ = "0.1.0"
