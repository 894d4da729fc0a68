"""Diffraction of the k-free integers: exact arithmetic, Z_k(x) scans and checks."""

from fractions import Fraction

from ._kfree import (
    CapacityError,
    FitResult,
    Patch,
    Sieve,
    ZValue,
    density,
    empirical_intensity,
    enumerate_support,
    euler_phi,
    f_k,
    fit_loglog,
    generate_patch,
    intensity,
    min_contributing_qbar,
    pair_frequencies,
    radical,
    run_cli,
    scan,
    tail_bound,
    two_param_totient,
    verify_fk_bounds,
    verify_mu_tail,
    verify_phi_approx,
    z_adaptive,
    z_grouped,
    z_grouped_exact,
    z_naive_exact,
    zeta,
)

__all__ = [
    "CapacityError",
    "FitResult",
    "Fraction",
    "Patch",
    "Sieve",
    "ZValue",
    "density",
    "empirical_intensity",
    "enumerate_support",
    "euler_phi",
    "f_k",
    "fit_loglog",
    "generate_patch",
    "intensity",
    "min_contributing_qbar",
    "pair_frequencies",
    "radical",
    "run_cli",
    "scan",
    "tail_bound",
    "two_param_totient",
    "verify_fk_bounds",
    "verify_mu_tail",
    "verify_phi_approx",
    "z_adaptive",
    "z_grouped",
    "z_grouped_exact",
    "z_naive_exact",
    "zeta",
]
