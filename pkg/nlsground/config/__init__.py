"""
Configuration package for nlsground.
"""
