"""Numerical laboratory for finite-area hyperbolic surfaces with
profile-perturbed cusp metrics: group coding, transfer-operator spectra,
convergence certificates and orbital counting."""

__version__ = "0.1.0"
