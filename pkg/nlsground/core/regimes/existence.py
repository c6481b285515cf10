"""
Existence classification of ground states by the sign of beta and d*sigma versus 2.

Clauses:
    i    0 < d sigma < 2, any beta
    ii   d sigma = 2, beta > -(sigma+1)/2 C_b
    iii  d sigma > 2, beta >= 0
    i'   d sigma = 2, beta <= -(sigma+1)/2 C_b  (no ground state)
    ii'  d sigma > 2, beta < 0                  (no ground state)
"""
import math
from typing import Optional, Union

from nlsground.core.errors import InvalidParamsError, OutOfModelError
from nlsground.core.models.schemas import BestConstant, ExistenceVerdict, Verdict

CRITICAL_TOL = 1e-12


def classify_existence(d: int, sigma: float, beta: float,
                       cb: Optional[Union[BestConstant, float]] = None) -> ExistenceVerdict:
    """Classify existence and uniqueness of the ground state.

    Args:
        d: Spatial dimension (1, 2 or 3)
        sigma: Nonlinearity power, must be positive
        beta: Interaction strength
        cb: Best constant C_b(d, sigma); only consulted when d*sigma = 2 and beta < 0

    Returns:
        The verdict and the clause that produced it

    Raises:
        OutOfModelError: If sigma <= 0
        InvalidParamsError: If d is not 1, 2 or 3 or beta is not finite
    """
    if d not in (1, 2, 3):
        raise InvalidParamsError(f"Dimension must be 1, 2 or 3, got {d}")
    if not (math.isfinite(sigma) and sigma > 0):
        raise OutOfModelError(f"sigma must be positive for the nonlinear problem, got {sigma}")
    if not math.isfinite(beta):
        raise InvalidParamsError(f"beta must be finite, got {beta}")

    product = d * sigma
    factor = -(sigma + 1.0) / 2.0

    def verdict(kind: Verdict, clause: str, threshold: Optional[float] = None) -> ExistenceVerdict:
        return ExistenceVerdict(kind, clause, d, sigma, beta, threshold,
                                factor if math.isclose(product, 2.0, abs_tol=CRITICAL_TOL) else None)

    if beta >= 0:
        clause = "i" if product < 2.0 - CRITICAL_TOL else ("ii" if product <= 2.0 + CRITICAL_TOL else "iii")
        return verdict(Verdict.EXISTS_UNIQUE, clause)

    if product < 2.0 - CRITICAL_TOL:
        return verdict(Verdict.EXISTS, "i")
    if product > 2.0 + CRITICAL_TOL:
        return verdict(Verdict.NOT_EXISTS, "ii'")

    if cb is None:
        return verdict(Verdict.CONDITIONAL, "ii")
    value = cb.value if isinstance(cb, BestConstant) else float(cb)
    if not value > 0:
        raise InvalidParamsError(f"Best constant must be positive, got {value}")
    threshold = factor * value
    if beta > threshold:
        return verdict(Verdict.EXISTS, "ii", threshold)
    return verdict(Verdict.NOT_EXISTS, "i'", threshold)
