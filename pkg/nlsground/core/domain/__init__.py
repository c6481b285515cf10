"""
Grid operators and energy functionals.
"""
