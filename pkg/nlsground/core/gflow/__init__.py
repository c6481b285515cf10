"""
Normalized gradient flow solver.
"""
