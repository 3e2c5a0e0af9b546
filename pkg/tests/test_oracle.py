import numpy as np
import pytest

from zoblocks import (BlockLayout, ConfigError, NoiseModel, RngStream,
                      SmoothedOracle, gaussian_direction, make_problem)


def quad_oracle(n=2, mu=0.1, noise=None, a=1.0):
    layout = BlockLayout.uniform(n, 1)

    def f(X):
        return 0.5 * a * (X * X).sum(axis=1)

    f.evaluates_batches = True
    return SmoothedOracle(f, layout, mu, noise)


def test_stream_determinism_and_children():
    s = RngStream(123)
    a = s.child(2, 7).generator().standard_normal(6)
    b = s.child(2, 7).generator().standard_normal(6)
    c = s.child(2, 8).generator().standard_normal(6)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_gaussian_direction_contracts():
    gen = RngStream(5).child(0).generator()
    u1 = gaussian_direction(gen, 4)
    u2 = gaussian_direction(RngStream(5).child(0).generator(), 4)
    assert np.array_equal(u1, u2)
    with pytest.raises(ValueError):
        gaussian_direction(gen, 0)


def test_gaussian_direction_moments():
    gen = RngStream(11).generator()
    draws = gen.standard_normal((10**5, 6))
    se_mean = 1.0 / np.sqrt(10**5)
    assert np.all(np.abs(draws.mean(axis=0)) <= 4 * se_mean)
    norms_sq = (draws * draws).sum(axis=1)
    se_chi = np.sqrt(2.0 * 6 / 10**5)
    assert abs(norms_sq.mean() - 6) <= 4 * se_chi


def test_evaluate_noiseless():
    o = quad_oracle(2, mu=0.1)
    val = o.evaluate(np.array([1.0, 2.0]), RngStream(0).generator())
    assert val == pytest.approx(2.5)  # 0.5 * ||(1,2)||^2
    assert o.calls == 1


def test_gradient_consistent_zero_sigma_is_noiseless():
    o = quad_oracle(3, noise=NoiseModel.gradient_consistent(0.0))
    x = np.array([0.3, -1.0, 2.0])
    v = o.evaluate(x, RngStream(1).generator())
    assert v == pytest.approx(0.5 * float(x @ x))


def test_gradient_consistent_value_variance():
    # F(x, xi) = <xi, x> at f = 0: Var F = sigma^2 / n for unit-norm x
    n = 8
    layout = BlockLayout.uniform(n, 1)

    def zero(X):
        return np.zeros(len(X))

    zero.evaluates_batches = True
    o = SmoothedOracle(zero, layout, 0.1, NoiseModel.gradient_consistent(1.0))
    gen = RngStream(3).generator()
    x = np.zeros(n)
    x[0] = 1.0
    vals = np.array([o.evaluate(x, gen) for _ in range(10**5)])
    assert vals.var() == pytest.approx(1.0 / n, rel=0.05)


def test_additive_noise_cancels_in_estimator():
    noisy = quad_oracle(2, noise=NoiseModel.additive_gaussian_value(5.0))
    clean = quad_oracle(2)
    x = np.array([1.0, -0.5])
    g1 = noisy.estimate(x, RngStream(9).generator())
    g2 = clean.estimate(x, RngStream(9).generator())
    assert np.array_equal(g1, g2)


def test_estimator_linear_objective_exact():
    # f = <c, x> with c = (1, 0): G = <c, u> u for any mu
    layout = BlockLayout.uniform(2, 1)
    c = np.array([1.0, 0.0])

    def f(X):
        return X @ c

    f.evaluates_batches = True
    for mu in (0.01, 0.5):
        o = SmoothedOracle(f, layout, mu)
        gen = RngStream(4).generator()
        u = gen.standard_normal(2)
        g = o.estimate(np.array([3.0, -1.0]), RngStream(4).generator())
        assert np.allclose(g, (c @ u) * u, rtol=1e-9, atol=1e-9)


def test_estimator_quadratic_substitution():
    # f = ||x||^2 / 2, x = (1, 0), u = (1, 1), mu = 0.1:
    # [f(x + mu u) - f(x)] / mu = (0.61 - 0.5) / 0.1 = 1.1
    o = quad_oracle(2, mu=0.1)
    x = np.array([1.0, 0.0])
    base = o.evaluate(x, RngStream(0).generator())
    plus = o.evaluate(x + 0.1 * np.array([1.0, 1.0]), RngStream(0).generator())
    g = (plus - base) / 0.1 * np.array([1.0, 1.0])
    assert np.allclose(g, [1.1, 1.1])


def test_call_accounting():
    o = quad_oracle(4)
    gen = RngStream(2).generator()
    o.estimate(np.zeros(4), gen)
    assert o.calls == 2
    o.estimate_batch(np.zeros(4), 7, gen)
    assert o.calls == 2 + 14
    o.batch_block_estimate(np.zeros(4), 0, 5, gen)
    assert o.calls == 16 + 10


def test_batch_of_one_equals_single_estimate():
    layout = BlockLayout.uniform(6, 3)
    p = make_problem("quadratic", 6, 3, {"linear": "seeded"}, audit=False)
    o = SmoothedOracle(p.value_batch, layout, 0.05,
                       NoiseModel.gradient_consistent(0.3))
    x = np.arange(6.0) / 3
    full = o.estimate(x, RngStream(8).child(1).generator())
    blk = o.batch_block_estimate(x, 1, 1, RngStream(8).child(1).generator())
    assert np.array_equal(blk, full[layout.slice(1)])


def test_batch_variance_scales_inversely():
    p = make_problem("quadratic", 8, 2, {"linear": "seeded"}, audit=False)
    o = SmoothedOracle(p.value_batch, p.layout, 0.05,
                       NoiseModel.gradient_consistent(0.5))
    x = np.full(8, 0.7)
    reps = 400

    def batch_means(tk, base):
        out = np.empty((reps, 8))
        for r in range(reps):
            gen = RngStream(base).child(r).generator()
            out[r] = o.estimate_batch(x, tk, gen).mean(axis=0)
        return out

    m16 = batch_means(16, base=300).var(axis=0).mean()
    m64 = batch_means(64, base=400).var(axis=0).mean()
    assert m16 / m64 == pytest.approx(4.0, rel=0.30)


def test_smoothed_value_mc_matches_quadratic_shift():
    # f_mu - f = mu^2 * trace(A) / 2 for quadratics
    n, mu = 6, 0.2
    p = make_problem("quadratic", n, 2, {"linear": "seeded"}, audit=False)
    o = SmoothedOracle(p.value_batch, p.layout, mu)
    gen = RngStream(6).generator()
    x = gen.standard_normal(n)
    N = 2 * 10**5
    est = o.smoothed_value_mc(x, N, RngStream(7).generator())
    target = p.smoothed_value(x, mu)
    # spread of f(x + mu*u) across draws governs the Monte-Carlo error
    draws = x + mu * RngStream(7).generator().standard_normal((4000, n))
    se = p.value_batch(draws).std() / np.sqrt(N)
    assert abs(est - target) <= 4 * se


def test_smoothed_grad_mc_linear_exact_mean():
    layout = BlockLayout.uniform(3, 1)
    c = np.array([1.5, -2.0, 0.5])

    def f(X):
        return X @ c

    f.evaluates_batches = True
    o = SmoothedOracle(f, layout, 0.05)
    est = o.smoothed_grad_mc(np.zeros(3), 2 * 10**5, RngStream(12).generator())
    # G = <c,u>u has per-coordinate variance <= ||c||^2 * 3
    se = np.sqrt(3.0 * float(c @ c) / (2 * 10**5))
    assert np.all(np.abs(est - c) <= 4 * se)


def test_mu_floor_and_smoothing_continuity():
    with pytest.raises(ConfigError):
        quad_oracle(2, mu=1e-9)
    x = np.array([0.4, -0.2])
    gaps = []
    for mu in (0.2, 0.05, 0.01):
        o = quad_oracle(2, mu=mu)
        fmu = o.smoothed_value_mc(x, 5 * 10**4, RngStream(13).generator())
        gaps.append(abs(fmu - 0.5 * float(x @ x)))
    assert gaps[2] < gaps[0]


def test_plain_scalar_objective_accepted():
    layout = BlockLayout.uniform(2, 1)
    o = SmoothedOracle(lambda x: float(np.sum(x ** 2)), layout, 0.1)
    assert o.evaluate(np.array([1.0, 2.0]),
                      RngStream(0).generator()) == pytest.approx(5.0)
