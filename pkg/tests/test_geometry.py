import numpy as np
import pytest

from zoblocks import (BlockGeometry, BlockLayout, ConfigError,
                      DistanceGenerator, FeasibleBlock, ProductGeometry,
                      Regularizer, bregman_div, project_simplex)
from zoblocks.oracle import RngStream


def box_geom(dim=1, lo=-1.0, hi=1.0, chi=None):
    return BlockGeometry(FeasibleBlock.box(np.full(dim, lo), np.full(dim, hi)),
                         "euclidean", chi)


def grid_min(objective, lo=-5.0, hi=5.0, step=1e-4):
    ys = np.arange(lo, hi + step, step)
    vals = objective(ys)
    return ys[np.argmin(vals)]


# ---------------------------------------------------------------------------
# bregman divergences
# ---------------------------------------------------------------------------

def test_bregman_euclidean():
    phi = DistanceGenerator("euclidean")
    x = np.array([1.0, 0.0])
    assert bregman_div(phi, x, x) == 0.0
    assert bregman_div(phi, x, np.zeros(2)) == pytest.approx(0.5)


def test_bregman_entropy_matches_kl():
    phi = DistanceGenerator("entropy")
    x = np.array([0.5, 0.5])
    y = np.array([0.9, 0.1])
    kl = sum(float(a * np.log(a / b)) for a, b in zip(x, y))
    assert bregman_div(phi, x, y) == pytest.approx(kl, rel=1e-12)
    assert bregman_div(phi, x, y) == pytest.approx(0.5108256237659907)
    with pytest.raises(ValueError):
        bregman_div(phi, x, np.array([1.0, 0.0]))


def test_strong_convexity_samples():
    rng = np.random.default_rng(0)
    phi_e = DistanceGenerator("euclidean")
    phi_h = DistanceGenerator("entropy")
    for _ in range(1000):
        x = rng.dirichlet(np.ones(4) * 2)
        y = rng.dirichlet(np.ones(4) * 2)
        d = float(np.sum((x - y) ** 2))
        assert phi_e.bregman(x, y) >= 0.5 * d - 1e-12
        assert phi_h.bregman(x, y) >= 0.5 * d - 1e-12


# ---------------------------------------------------------------------------
# prox closed forms against grid-search references
# ---------------------------------------------------------------------------

def test_prox_projected_gradient_step():
    g = box_geom()
    out = g.prox(np.array([0.5]), np.array([2.0]), 0.5)
    assert out[0] == pytest.approx(-0.5)  # clip(0.5 - 1.0)


def test_prox_entropy_fixed_point():
    geo = BlockGeometry(FeasibleBlock.simplex(2), DistanceGenerator("entropy"))
    x = np.array([0.3, 0.7])
    out = geo.prox(x, np.zeros(2), 0.7)
    assert np.allclose(out, x, atol=1e-14)


def test_prox_soft_threshold_vs_grid():
    geo = BlockGeometry(FeasibleBlock.free(1), "euclidean", Regularizer.l1(1.0))
    out = geo.prox(np.array([2.0]), np.array([0.0]), 1.0)
    assert out[0] == pytest.approx(1.0)
    ref = grid_min(lambda y: 0.5 * (y - 2.0) ** 2 + np.abs(y))
    assert abs(out[0] - ref) <= 1e-4


def test_prox_box_l1_vs_grid():
    rng = np.random.default_rng(42)
    geo = box_geom(chi=Regularizer.l1(0.7))
    for _ in range(50):
        x = rng.uniform(-1, 1, 1)
        g = rng.standard_normal(1)
        alpha = rng.uniform(0.05, 2.0)
        out = geo.prox(x, g, alpha)

        def obj(y):
            return g[0] * y + (y - x[0]) ** 2 / (2 * alpha) + 0.7 * np.abs(y)

        ref = grid_min(obj, -1, 1)
        assert obj(np.array([out[0]]))[()] <= obj(np.array([ref]))[()] + 1e-7


def test_prox_entropy_chi_vs_grid():
    # 2-d simplex reduces to one free coordinate: scan it
    geo = BlockGeometry(FeasibleBlock.simplex(2), DistanceGenerator("entropy"),
                        Regularizer.entropy(0.5))
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.dirichlet((2.0, 2.0))
        g = rng.standard_normal(2)
        alpha = rng.uniform(0.1, 1.0)
        out = geo.prox(x, g, alpha)

        ts = np.linspace(1e-9, 1 - 1e-9, 200001)

        def obj(t):
            y0, y1 = t, 1 - t
            kl = y0 * np.log(y0 / x[0]) + y1 * np.log(y1 / x[1])
            ent = y0 * np.log(y0) + y1 * np.log(y1)
            return g[0] * y0 + g[1] * y1 + kl / alpha + 0.5 * ent

        ref = ts[np.argmin(obj(ts))]
        assert out[0] == pytest.approx(ref, abs=2e-5)
        assert out.sum() == pytest.approx(1.0)


def test_unsupported_triple_rejected():
    with pytest.raises(ConfigError):
        BlockGeometry(FeasibleBlock.simplex(3), "euclidean")
    with pytest.raises(ConfigError):
        BlockGeometry(FeasibleBlock.ball(3, 1.0), "euclidean",
                      Regularizer.l1(0.1))
    with pytest.raises(ConfigError):
        BlockGeometry(FeasibleBlock.box(-np.ones(2), np.ones(2)),
                      DistanceGenerator("entropy"))
    with pytest.raises(ConfigError):
        BlockGeometry(FeasibleBlock.simplex(3, scale=2.0),
                      DistanceGenerator("entropy"))


# ---------------------------------------------------------------------------
# gradient mapping
# ---------------------------------------------------------------------------

def test_mapping_unconstrained_equals_gradient():
    layout = BlockLayout((2, 2))
    geom = ProductGeometry.uniform(
        layout, lambda d: BlockGeometry(FeasibleBlock.free(d), "euclidean"))
    x = np.array([1.0, -2.0, 0.5, 0.0])
    g = np.array([0.3, 1.0, -0.7, 2.0])
    assert np.allclose(geom.gradient_mapping(x, g, 0.37), g, atol=1e-14)
    assert np.allclose(geom.gradient_mapping(x, np.zeros(4), 0.37), 0.0)


def test_mapping_boundary_absorption():
    geo = box_geom()
    m = geo.mapping(np.array([1.0]), np.array([-3.0]), 0.1)
    assert m[0] == pytest.approx(0.0)  # clip(1 + 0.3) = 1


# ---------------------------------------------------------------------------
# linear minimization oracles
# ---------------------------------------------------------------------------

def test_lmo_box_corner():
    geo = box_geom(dim=2)
    assert np.array_equal(geo.lmo(np.array([1.0, -2.0])), [-1.0, 1.0])
    # zero coefficients resolve to the lower bound
    assert np.array_equal(geo.lmo(np.zeros(2)), [-1.0, -1.0])


def test_lmo_simplex_vertex():
    geo = BlockGeometry(FeasibleBlock.simplex(2), DistanceGenerator("entropy"))
    assert np.array_equal(geo.lmo(np.array([0.1, 0.5]), include_chi=False),
                          [1.0, 0.0])


def test_lmo_box_l1_candidates():
    geo = box_geom(chi=Regularizer.l1(3.0))
    assert geo.lmo(np.array([1.0]))[0] == 0.0
    # values: -1 -> 2, 0 -> 0, 1 -> 4


def test_lmo_ball():
    geo = BlockGeometry(FeasibleBlock.ball(3, 2.0), "euclidean")
    g = np.array([0.0, 3.0, 4.0])
    assert np.allclose(geo.lmo(g), -2.0 * g / 5.0)
    assert np.allclose(geo.lmo(np.zeros(3)), 0.0)


def test_lmo_unbounded_rejected():
    geo = BlockGeometry(FeasibleBlock.free(2), "euclidean")
    with pytest.raises(ConfigError):
        geo.lmo(np.ones(2))
    geo_l1 = BlockGeometry(FeasibleBlock.free(2), "euclidean",
                           Regularizer.l1(0.5))
    assert np.array_equal(geo_l1.lmo(np.array([0.2, -0.3])), [0.0, 0.0])
    with pytest.raises(ConfigError):
        geo_l1.lmo(np.array([1.0, 0.0]))


def test_lmo_grid_check_random_boxes():
    rng = np.random.default_rng(7)
    for _ in range(200):
        lo = rng.uniform(-2, -0.1, 3)
        hi = rng.uniform(0.1, 2, 3)
        w = rng.uniform(0, 1.5)
        geo = BlockGeometry(FeasibleBlock.box(lo, hi), "euclidean",
                            Regularizer.l1(w))
        g = rng.standard_normal(3)
        v = geo.lmo(g)
        obj = lambda y: float(g @ y + w * np.abs(y).sum())
        best = obj(v)
        for _ in range(300):
            y = rng.uniform(lo, hi)
            assert best <= obj(y) + 1e-12


# ---------------------------------------------------------------------------
# prox lemma properties (the full 1000-sample sweep runs in acceptance)
# ---------------------------------------------------------------------------

def sample_triple(kind, rng, dim=4):
    if kind == "box-zero":
        geo = box_geom(dim=dim)
        x = rng.uniform(-1, 1, dim)
    elif kind == "box-l1":
        geo = box_geom(dim=dim, chi=Regularizer.l1(0.3))
        x = rng.uniform(-1, 1, dim)
    elif kind == "ball-zero":
        geo = BlockGeometry(FeasibleBlock.ball(dim, 1.5), "euclidean")
        x = geo.feasible.sample(rng)
    elif kind == "simplex-zero":
        geo = BlockGeometry(FeasibleBlock.simplex(dim),
                            DistanceGenerator("entropy"))
        x = rng.dirichlet(np.full(dim, 2.0))
    else:
        geo = BlockGeometry(FeasibleBlock.simplex(dim),
                            DistanceGenerator("entropy"),
                            Regularizer.entropy(0.4))
        x = rng.dirichlet(np.full(dim, 2.0))
    return geo, x


TRIPLES = ("box-zero", "box-l1", "ball-zero", "simplex-zero", "simplex-entropy")


@pytest.mark.parametrize("kind", TRIPLES)
def test_prox_nonexpansion_and_descent(kind):
    rng = np.random.default_rng(hash(kind) % 2**32)
    for _ in range(200):
        geo, x = sample_triple(kind, rng)
        g1 = rng.standard_normal(geo.dim)
        g2 = rng.standard_normal(geo.dim)
        alpha = rng.uniform(0.05, 1.5)
        p1, p2 = geo.prox(x, g1, alpha), geo.prox(x, g2, alpha)
        assert geo.feasible.contains(p1, tol=1e-10)
        # prox non-expansion in the gradient argument
        assert np.linalg.norm(p1 - p2) <= alpha * np.linalg.norm(g1 - g2) + 1e-10
        # mapping non-expansion
        m1 = geo.mapping(x, g1, alpha)
        m2 = geo.mapping(x, g2, alpha)
        assert np.linalg.norm(m1 - m2) <= np.linalg.norm(g1 - g2) + 1e-10
        # descent inequality
        lhs = float(g1 @ m1)
        rhs = float(m1 @ m1) + (geo.chi.value(p1) - geo.chi.value(x)) / alpha
        assert lhs >= rhs - 1e-10


# ---------------------------------------------------------------------------
# conditional gradient
# ---------------------------------------------------------------------------

def test_cndg_immediate_termination():
    geo = box_geom(dim=3)
    x = np.array([0.1, -0.2, 0.5])
    u, t = geo.cndg(x, np.full(3, 0.01), alpha=0.5, delta=100.0)
    assert t == 1
    assert np.array_equal(u, x)


def test_cndg_zero_gradient_returns_x():
    geo = box_geom(dim=2)
    x = np.array([0.3, -0.4])
    u, t = geo.cndg(x, np.zeros(2), alpha=1.0, delta=1e-6)
    assert np.array_equal(u, x)
    assert t == 1


def test_cndg_approximation_bound_box():
    rng = np.random.default_rng(21)
    for alpha in (0.1, 1.0):
        for delta in (1e-2, 1e-4):
            for _ in range(25):
                dim = int(rng.integers(1, 5))
                geo = box_geom(dim=dim)
                x = rng.uniform(-1, 1, dim)
                g = rng.standard_normal(dim)
                u, t = geo.cndg(x, g, alpha, delta)
                p = geo.prox(x, g, alpha)
                assert float(np.sum((u - p) ** 2)) <= alpha * delta
                assert geo.feasible.contains(u, tol=1e-12)


def test_cndg_box_l1_approximation():
    rng = np.random.default_rng(22)
    geo = box_geom(dim=3, chi=Regularizer.l1(0.4))
    for _ in range(50):
        x = rng.uniform(-1, 1, 3)
        g = rng.standard_normal(3)
        u, _ = geo.cndg(x, g, 0.5, 1e-5)
        p = geo.prox(x, g, 0.5)
        assert float(np.sum((u - p) ** 2)) <= 0.5 * 1e-5


def test_cndg_simplex_entropy_phi():
    geo = BlockGeometry(FeasibleBlock.simplex(4), DistanceGenerator("entropy"))
    rng = np.random.default_rng(23)
    for _ in range(20):
        x = rng.dirichlet(np.full(4, 2.0))
        g = rng.standard_normal(4)
        u, _ = geo.cndg(x, g, 0.3, 1e-5)
        p = geo.prox(x, g, 0.3)
        assert float(np.sum((u - p) ** 2)) <= 0.3 * 1e-5


def test_cndg_cap_raises():
    from zoblocks import InnerLoopStallError
    geo = box_geom(dim=4)
    with pytest.raises(InnerLoopStallError) as err:
        geo.cndg(np.zeros(4), np.full(4, 0.3), alpha=0.1, delta=1e-12,
                 max_inner=3)
    assert err.value.last_gap is not None


# ---------------------------------------------------------------------------
# projections and product geometry
# ---------------------------------------------------------------------------

def test_project_simplex_reference():
    rng = np.random.default_rng(31)
    for _ in range(200):
        y = rng.standard_normal(5) * 2
        p = project_simplex(y)
        assert p.sum() == pytest.approx(1.0)
        assert np.all(p >= 0)
        for _ in range(100):
            q = rng.dirichlet(np.ones(5))
            assert np.sum((y - p) ** 2) <= np.sum((y - q) ** 2) + 1e-9


def test_product_geometry_checks():
    layout = BlockLayout((2, 3))
    geom = ProductGeometry(layout, [
        box_geom(dim=2),
        BlockGeometry(FeasibleBlock.simplex(3), DistanceGenerator("entropy")),
    ])
    assert geom.bounded
    x = np.array([0.5, -0.5, 0.2, 0.3, 0.5])
    assert geom.contains(x)
    assert not geom.contains(np.array([2.0, 0.0, 0.2, 0.3, 0.5]))
    d = geom.diameters()
    assert d[0] == pytest.approx(np.sqrt(8.0))
    assert d[1] == pytest.approx(np.sqrt(2.0))
    with pytest.raises(ConfigError):
        ProductGeometry(layout, [box_geom(dim=2)])


def test_feasible_sampling():
    rng = RngStream(77).generator()
    for fb in (FeasibleBlock.box(-np.ones(3), np.ones(3)),
               FeasibleBlock.ball(3, 0.5), FeasibleBlock.simplex(3)):
        for _ in range(100):
            assert fb.contains(fb.sample(rng), tol=1e-9)
