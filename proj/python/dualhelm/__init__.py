# Copyright the dualhelm authors.
# SPDX-License-Identifier: Apache-2.0
"""Dual variational tools for the critical nonlinear Helmholtz equation."""

from ._core import (
    CoefficientSpec,
    admissible_radius,
    bessel_y,
    certify_difference_bounds,
    farfield_fit,
    first_zero,
    l_q_star,
    n3_probe,
    newton_kernel,
    psi,
    psi_minus_lambda,
    sobolev_constant,
    solve_radial,
    strict_gap_scan,
)

__all__ = [
    "CoefficientSpec",
    "admissible_radius",
    "bessel_y",
    "certify_difference_bounds",
    "farfield_fit",
    "first_zero",
    "l_q_star",
    "n3_probe",
    "newton_kernel",
    "psi",
    "psi_minus_lambda",
    "sobolev_constant",
    "solve_radial",
    "strict_gap_scan",
]
