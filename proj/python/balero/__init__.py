"""Bayesian population estimation for noisy qubit readout."""

from balero._core import (
    BaleroError,
    BimodalResponse,
    GaussianComponent,
    PosteriorGrid1D,
    ProjectionSpec,
    QubitResponseModel,
    avg_ground_population_error,
    bell_populations,
    bitstring_populations,
    bitstring_preset,
    calibrate_qubit,
    estimate_populations,
    fit_bimodal,
    make_detector,
    misassignment_rate,
    overlap_integral,
    posterior_estimate,
    quito_like_preset,
    readout_error,
    run_benchmark,
    run_cli,
    ry_populations,
    sample_shots,
    scenario_names,
    separatrix,
    total_population_error,
    uniform_prior,
    update_posterior,
)

__all__ = [name for name in dir() if not name.startswith("_")]
