"""Structure-preserving Lie-Poisson integrators for quantized MHD-type flows."""

__version__ = "0.1.0"
