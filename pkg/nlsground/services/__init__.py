"""
Service layer wiring core numerics to the command line.
"""
