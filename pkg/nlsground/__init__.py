"""
nlsground: ground states of the nonlinear Schrödinger equation with power nonlinearity.
"""

__version__ = "0.1.0"
