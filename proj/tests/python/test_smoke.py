import math

import pytest

import balero


def test_single_qubit_estimate_is_physical():
    models = balero.quito_like_preset()[:1]
    truth = balero.ry_populations(1.0)
    shots = balero.sample_shots(truth, models, 4000, 3)
    result = balero.estimate_populations(models, shots)
    assert result["path"] == "single"
    assert math.isclose(sum(result["populations"]), 1.0, abs_tol=1e-9)
    assert all(0.0 <= p <= 1.0 for p in result["populations"])
    assert balero.total_population_error(truth, result["populations"]) < 0.1


def test_estimators_agree_on_separated_detector():
    model = balero.make_detector("q", 12.0, 1.0, 0.0, 0.0)
    shots = balero.sample_shots([0.3, 0.7], [model], 2000, 5)
    counts = balero.estimate_populations([model], shots, estimator="counts")["populations"]
    bayes = balero.estimate_populations([model], shots)["populations"]
    assert abs(counts[0] - bayes[0]) < 2.0 / 1001


def test_posterior_grid_round_trip():
    model = balero.make_detector("q", 2.0, 1.0, 0.03, 0.05)
    grid = balero.update_posterior(balero.uniform_prior(), model, [-1.0, 0.5, 1.2])
    assert grid.n_points == 1001
    assert math.isclose(grid.trapezoid_mass(), 1.0, abs_tol=1e-9)
    est = balero.posterior_estimate(grid)
    assert math.isclose(sum(est["populations"]), 1.0, abs_tol=1e-12)


def test_four_qubit_pairwise_path():
    models = balero.bitstring_preset()
    shots = balero.sample_shots(balero.bitstring_populations("0110"), models, 1000, 7)
    result = balero.estimate_populations(models, shots)
    assert result["path"] == "pairwise"
    assert result["stop_reason"] == "converged"
    assert result["populations"][6] > 0.9


def test_calibration_from_iq_shots():
    import random

    rng = random.Random(1)
    ground = [(rng.gauss(-2, 1), rng.gauss(0, 1)) for _ in range(3000)]
    excited = [(rng.gauss(2, 1), rng.gauss(0, 1)) for _ in range(3000)]
    model = balero.calibrate_qubit(ground, excited, qubit_id="Q0")
    assert model.qubit_id == "Q0"
    assert model.p_g.main.mean < model.p_e.main.mean
    assert abs(model.p_e.main.mean - model.p_g.main.mean - 4.0) < 0.2
    assert balero.misassignment_rate(model) < 0.05


def test_errors_carry_codes():
    with pytest.raises(balero.BaleroError) as info:
        balero.run_benchmark("teleport")
    assert info.value.code == "UnknownScenario"
    with pytest.raises(ValueError):
        balero.bitstring_populations("012")


def test_benchmark_and_cli(tmp_path):
    result = balero.run_benchmark("bell", n_shots=[200], n_seeds=2, calibration_shots=0)
    assert len(result["metrics"]) == 2 * 3
    assert all(row["value"] >= 0 for row in result["metrics"])
    code, out, err = balero.run_cli(["simulate", "--state", "bell", "--n-shots", "50",
                                     "--calibration-shots", "0", "--out", str(tmp_path)])
    assert code == 0, err
    assert (tmp_path / "shots.csv").exists()
    assert balero.run_cli(["benchmark", "--scenario", "nope"])[0] == 2
