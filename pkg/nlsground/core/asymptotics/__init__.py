"""
Closed-form and ODE-based approximations of ground states.
"""
