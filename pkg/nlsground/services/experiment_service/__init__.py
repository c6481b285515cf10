"""
Run specifications, experiment runner and figure reproduction.
"""
