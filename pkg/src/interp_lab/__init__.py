"""Error bounds, sharpness certificates and worst-case functions for
multivariate linear interpolation and extrapolation."""

from interp_lab._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
