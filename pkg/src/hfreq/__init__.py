"""Frequency-space Fourier analysis on the Heisenberg group H^d."""
__version__ = "0.1.0"
