"""Servicios de dominio: certificados, permanencias, simulación, escenarios y exportaciones."""

from .lyapunov import (
    check_certificate,
    in_region,
    lyapunov_gradient,
    region_boundary_points,
    region_membership,
    v_eval,
)
from .dwell import (
    combined_dwell,
    epsilon0_search,
    estimate_mu,
    global_dwell,
    local_dwell,
    mu_bound,
    pairwise_dwell,
    triangle_gap,
)
from .sim import (
    closed_form_affine,
    convergence_product,
    integrate,
    simulate_switched,
    travel_comparison,
    tube_contains,
    tube_sample,
    verify_trapping,
    w_monitor,
)

__all__ = [
    'check_certificate',
    'in_region',
    'lyapunov_gradient',
    'region_boundary_points',
    'region_membership',
    'v_eval',
    'combined_dwell',
    'epsilon0_search',
    'estimate_mu',
    'global_dwell',
    'local_dwell',
    'mu_bound',
    'pairwise_dwell',
    'triangle_gap',
    'closed_form_affine',
    'convergence_product',
    'integrate',
    'simulate_switched',
    'travel_comparison',
    'tube_contains',
    'tube_sample',
    'verify_trapping',
    'w_monitor',
]
