"""Planar bubble clusters with long-range interaction.

Masses are (m1, m2, m3) triples; ``gamma`` is a symmetric 3x3 nested list
(None means no interaction).
"""

from ._tetra import (
    AccuracyError,
    DomainError,
    E_eta,
    NumericError,
    SingularityError,
    coexistence_params,
    configuration_energy,
    e0,
    e0_gradient,
    greens,
    kkt_spread,
    kronecker_regular_at_zero,
    mass_upper_bound,
    minimize,
    optimize_placement,
    oracle,
    perimeter,
    perimeter_gradient,
    regular_part,
    signature,
    solve,
)

IDENTITY = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
