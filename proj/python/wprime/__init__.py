"""Discretization and simulation of continuous-time LPV state-space models
with the w' (bilinear) method and an algebraic-loop-free realization."""

from ._core import (
    DomainError,
    IoError,
    LpvStateSpace,
    ModelError,
    StepMatrices,
    WellposednessError,
    WprimeError,
    convergence_order,
    dt_step_matrices,
    freqresp_ct,
    freqresp_dt,
    log_grid,
    phi,
    rinv_matrices,
    sigma_step,
    similarity_residual,
    simulate_ct_reference,
    simulate_dt,
    simulate_dt_loop_oracle,
    tustin_frozen,
    warping_residual,
    wellposedness_check,
)

__all__ = [
    "DomainError",
    "IoError",
    "LpvStateSpace",
    "ModelError",
    "StepMatrices",
    "WellposednessError",
    "WprimeError",
    "convergence_order",
    "dt_step_matrices",
    "freqresp_ct",
    "freqresp_dt",
    "log_grid",
    "phi",
    "rinv_matrices",
    "sigma_step",
    "similarity_residual",
    "simulate_ct_reference",
    "simulate_dt",
    "simulate_dt_loop_oracle",
    "tustin_frozen",
    "warping_residual",
    "wellposedness_check",
]
