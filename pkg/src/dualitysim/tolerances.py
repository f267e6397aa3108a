"""Numeric tolerances, fixed in one place.

ATOL_ALGEBRAIC bounds identities that hold exactly in real arithmetic
(unitarity, norm preservation, closed-form agreement, the binary entropy
identities).  ATOL_NORM is the looser bound deciding whether a probability
distribution counts as normalized.  INEQ_SLACK is the default absolute slack
applied to physical inequality predicates; every predicate accepts a per-call
override.
"""

ATOL_ALGEBRAIC = 1e-12
ATOL_NORM = 1e-9
INEQ_SLACK = 1e-9
