"""
Core numerics: models, functionals, gradient flow, asymptotics and regime analysis.
"""
