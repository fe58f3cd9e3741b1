"""Cellular binary-tree histograms for monotone densities on [0, 1]."""

from ._core import (
    Density,
    __version__,
    build_tree,
    choose_bin_count,
    constants,
    ell_star,
    estimate,
    gw_expected_size,
    l1_error,
    normal_upper_tail,
    phi_gamma_bound,
    proposition3_bound,
    run_convergence,
    run_runtime,
    split_probability_exact,
    verify_lemmas,
)

__all__ = [
    "Density",
    "__version__",
    "build_tree",
    "choose_bin_count",
    "constants",
    "ell_star",
    "estimate",
    "gw_expected_size",
    "l1_error",
    "normal_upper_tail",
    "phi_gamma_bound",
    "proposition3_bound",
    "run_convergence",
    "run_runtime",
    "split_probability_exact",
    "verify_lemmas",
]
