import numpy as np
import pytest

from zoblocks import ConfigError, make_problem, problem_names
from zoblocks.diagnostics import grad_mapping_sq
from zoblocks.problems import (audit_block_lipschitz, audit_gradient_bound,
                               audit_gradient_lipschitz, power_iteration_norm)


def test_catalog_names():
    assert problem_names() == ["composite_lasso_box", "nonconvex_sigmoid_ls",
                               "quadratic", "simplex_entropy"]
    with pytest.raises(ConfigError):
        make_problem("no_such_problem", 4, 2)


def test_power_iteration_matches_svd():
    rng = np.random.default_rng(0)
    for shape in ((5, 8), (8, 5), (6, 6)):
        A = rng.standard_normal(shape)
        assert power_iteration_norm(A) == pytest.approx(
            np.linalg.norm(A, 2), rel=1e-8)
    assert power_iteration_norm(np.zeros((3, 4))) == 0.0


def test_quadratic_unit_curvatures():
    p = make_problem("quadratic", 6, 3, {"linear": [1.0, -2, 0.5, 0, 1, 3]})
    assert np.all(p.L_s == 1.0)
    assert p.L_f == 1.0
    assert np.allclose(p.x_star, [1.0, -2, 0.5, 0, 1, 3])
    assert p.f_star == pytest.approx(-0.5 * float(np.sum(np.square(p.x_star))))


def test_quadratic_smoothed_shift():
    a = [1.0, 2.0, 0.5, 3.0]
    p = make_problem("quadratic", 4, 2, {"curvatures": a, "linear": "seeded"})
    x = np.array([0.3, -0.2, 1.0, 0.0])
    mu = 0.15
    assert p.smoothed_value(x, mu) - p.value(x) == pytest.approx(
        0.5 * mu * mu * sum(a), rel=1e-12)


def test_quadratic_box_optimum_clipped():
    p = make_problem("quadratic", 4, 2,
                     {"linear": [2.0, -2.0, 0.3, 0.0], "box": (-1, 1)})
    assert np.allclose(p.x_star, [1.0, -1.0, 0.3, 0.0])
    assert p.geometry.contains(p.x_star)


def test_sigmoid_zero_design():
    p = make_problem("nonconvex_sigmoid_ls", 6, 2, {"design": "zero", "lam": 0.5})
    assert p.f_star == 0.0
    assert np.allclose(p.x_star, 0.0)
    assert np.all(p.L_s == pytest.approx(1.0))  # 2 * lam


@pytest.mark.parametrize("name,n,b,params", [
    ("quadratic", 10, 2, {"linear": "seeded"}),
    ("quadratic", 8, 4, {"curvatures": [1, 1, 2, 2, 0.5, 0.5, 3, 3],
                         "box": (-1, 1)}),
    ("nonconvex_sigmoid_ls", 12, 3, {}),
    ("composite_lasso_box", 24, 4, {}),
    ("composite_lasso_box", 12, 3, {"design": "identity"}),
    ("simplex_entropy", 12, 3, {"curvatures": [1.0, 2.0, 0.5]}),
])
def test_declared_constant_audits(name, n, b, params):
    p = make_problem(name, n, b, params, audit=False)
    assert audit_block_lipschitz(p) <= 0
    assert audit_gradient_lipschitz(p) <= 0
    assert audit_gradient_bound(p) <= 0


@pytest.mark.parametrize("name,params", [
    ("quadratic", {"linear": "seeded"}),
    ("quadratic", {"linear": "seeded", "box": (-0.5, 0.5)}),
    ("simplex_entropy", {}),
])
def test_mapping_vanishes_at_declared_optimum(name, params):
    p = make_problem(name, 8, 2, params, audit=False)
    v = grad_mapping_sq(p, p.geometry, p.x_star, alpha=1.0 / p.L_hat)
    assert v <= 1e-8


def test_initial_point_feasible():
    for name in problem_names():
        p = make_problem(name, 8, 2, audit=False)
        assert p.geometry.contains(p.initial_point())


def test_bad_dimensions_rejected():
    with pytest.raises(ConfigError):
        make_problem("quadratic", 4, 8)
    with pytest.raises(ConfigError):
        make_problem("quadratic", 4, 2, {"curvatures": -1.0})
