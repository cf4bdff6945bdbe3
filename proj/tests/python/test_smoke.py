import math

import numpy as np
import pytest

import isa_solver as isa


@pytest.fixture(scope="module")
def small():
    return isa.generate_instance(32, 3, 3)


def test_generated_instance_shape(small):
    assert small.A.shape == (32, 128)
    assert small.b.shape == (32,)
    assert small.erc_certified
    assert small.erc_value < 1.0
    assert small.f_star() == pytest.approx(2.323388799099483, abs=1e-12)
    assert len(small.support()) == 3


def test_instance_round_trip(tmp_path, small):
    path = str(tmp_path / "inst.txt")
    isa.save_instance(small, path)
    back = isa.load_instance(path)
    assert np.array_equal(back.A, small.A)
    assert np.array_equal(back.b, small.b)
    assert back.f_star() == small.f_star()


def test_projection_contract(small):
    fact = isa.GramFactorization(small.A)
    projector = isa.AffineProjector(fact, small.b)
    rng = np.random.default_rng(0)
    y = rng.standard_normal(small.A.shape[1])
    exact = projector.project(y, 0.0)
    assert exact.certificate.certified_error_bound == 0.0
    for eps in (1e-1, 1e-4, 1e-8):
        inexact = projector.project(y, eps)
        assert np.linalg.norm(inexact.point - exact.point) <= eps
        assert inexact.certificate.certified_error_bound <= eps


def test_predetermined_solve(small):
    fact = isa.GramFactorization(small.A)
    projector = isa.AffineProjector(fact, small.b)
    oracle = isa.L1Objective()
    schedule = isa.harmonic_pair_schedule(2.0, 2.0)
    stop = isa.StoppingConfig()
    stop.max_iterations = 2000
    x0 = isa.default_start(small.A, small.b)

    res = isa.solve_predetermined(oracle, projector, schedule, x0, stop)
    assert res.status == isa.SolveStatus.MaxIterations
    assert isa.status_string(res.status) == "max_iterations"
    assert len(res.trace) == 2000
    gaps = [row.f_k - small.f_star() for row in res.trace]
    assert min(gaps) < 0.1
    assert res.final_feasibility_inf < 1e-4


def test_dynamic_solve_hits_target(small):
    fact = isa.GramFactorization(small.A)
    projector = isa.AffineProjector(fact, small.b)
    oracle = isa.L1Objective()

    config = isa.DynamicConfig()
    config.phi = small.f_star() + 0.1
    config.lambda_ = isa.lambda_constant(1.0)
    config.accuracy = isa.AccuracyMode.OverestimationBound
    config.nu = isa.nu_default(1.0)
    config.distance_bound = isa.KnownOptimumDistance(small.x_star)
    stop = isa.StoppingConfig()
    stop.max_iterations = 10000

    res = isa.solve_dynamic(oracle, projector, config, isa.default_start(small.A, small.b), stop)
    assert res.status in (
        isa.SolveStatus.TargetReachedFeasible,
        isa.SolveStatus.StepBelowThreshold,
    )
    assert min(row.f_k for row in res.trace) <= config.phi + 1e-3


def test_python_callable_schedules(small):
    fact = isa.GramFactorization(small.A)
    projector = isa.AffineProjector(fact, small.b)
    oracle = isa.L1Objective()

    config = isa.DynamicConfig()
    config.phi = 0.0
    config.lambda_ = lambda k: 1.0 / (1.0 + 0.001 * k)
    config.accuracy = isa.AccuracyMode.FixedEps
    config.fixed_eps_value = 1e-10
    stop = isa.StoppingConfig()
    stop.max_iterations = 500

    res = isa.solve_dynamic(oracle, projector, config, isa.default_start(small.A, small.b), stop)
    assert res.iterations == 500
    assert res.final_feasibility_inf < 1e-8


def test_closed_form_accuracy_bounds():
    assert isa.eps_bar(2.0, 1.0, 1.0, 1.0, 0.0) == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-15)
    t = isa.eps_tilde(2.0, -1.0, 0.0, 1.0, 1.0, 1.0, 0.0)
    assert not t.negative_discriminant
    assert t.value == pytest.approx(2.0 * math.sqrt(3.0) - 3.0, abs=1e-12)
    blocked = isa.eps_tilde(0.1, -1.0, 0.0, 0.01, 1.0, 1.0, 0.0)
    assert blocked.negative_discriminant


def test_usage_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        isa.generate_instance(100, 3, 1)  # not a power of two
    with pytest.raises(ValueError):
        isa.harmonic_pair_schedule(1.0, 2.0)  # accuracy scale above step scale
