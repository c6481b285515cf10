"""
Utility helpers for nlsground.
"""
