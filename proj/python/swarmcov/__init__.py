"""Swarm coverage simulation, mean-field solver and field estimation."""

from ._swarmcov import (
    ConfigError,
    DegenerateError,
    DomainError,
    Error,
    EstimationProblem,
    Field,
    LoadError,
    NumericError,
    ShapeError,
    StepError,
    bump_field_2d,
    constant_field,
    invariant_distribution,
    load_field_csv,
    propagate,
    quadratic_field_1d,
    run,
    sample_ctmc,
    simulate_coverage,
    sine_field_1d,
    solve_diffusion,
    steady_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
