"""Peakons and periodic peakons of the generalized Camassa-Holm equation

    m_t + k1 (3 u u_x m + u^2 m_x) + k2 (2 m u_x + m_x u) = 0,   m = u - u_xx.
"""
__version__ = "0.1.0"

from .model import (AmplitudeSolution, Branch, Domain, ModelParams, TravelingProfile, make_peakon,
                    make_profile, solve_line_amplitudes, solve_periodic_amplitudes, zeta)

__all__ = [
    "AmplitudeSolution", "Branch", "Domain", "ModelParams", "TravelingProfile", "make_peakon",
    "make_profile", "solve_line_amplitudes", "solve_periodic_amplitudes", "zeta", "__version__",
]
