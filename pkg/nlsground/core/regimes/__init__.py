"""
Existence classification, best constants and bifurcation scans.
"""
