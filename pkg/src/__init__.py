"""
Generalized Sampling
Interpolation criteria, reconstruction kernels and signal reconstruction for
families of Fourier-multiplier operators on the Paley-Wiener space.
"""

__version__ = "1.0.0"
