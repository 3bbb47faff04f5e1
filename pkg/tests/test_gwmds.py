import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from gwembed.config import ExperimentConfig
from gwembed.datasets import generate_s_curve
from gwembed.errors import DimTooLargeError, DivergenceError, ShapeMismatchError
from gwembed.evaluation import pearson_distance_correlation
from gwembed.gwmds import (GwMdsState, align_embedding, gw_gradient_coords, gw_mds,
                           init_embedding, run_gw_mds)
from gwembed.metrics import pairwise_euclidean
from gwembed.ot import gw_cost
from gwembed.types import Coupling, PointCloud
from oracles import central_difference, gw_objective_loop, naive_pairwise, random_dist, random_plan


def _rel_err(a, b):
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


def test_randn_init_is_reproducible():
    x = PointCloud(np.ones((6, 3)))
    a = init_embedding(x, 2, "randn", seed=11)
    b = init_embedding(x, 2, "randn", seed=11)
    assert a.tobytes() == b.tobytes()
    np.testing.assert_array_equal(a, np.random.default_rng(11).standard_normal((6, 2)))


def test_pca_init_on_flat_data_preserves_distances():
    rng = np.random.default_rng(0)
    basis = np.linalg.qr(rng.standard_normal((3, 2)))[0]
    x = rng.standard_normal((20, 2)) @ basis.T + np.array([1.0, -2.0, 0.5])
    y = init_embedding(PointCloud(x), 2, "pca")
    np.testing.assert_allclose(naive_pairwise(y), naive_pairwise(x), atol=1e-9)


def test_init_errors():
    with pytest.raises(DimTooLargeError):
        init_embedding(PointCloud(np.zeros((4, 2))), 3)
    with pytest.raises(ValueError):
        init_embedding(PointCloud(np.zeros((4, 2))), 1, "zeros")


@pytest.mark.parametrize("seed", range(4))
def test_coord_gradient_finite_difference(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 11))
    cx, _ = random_dist(rng, n)
    y = rng.standard_normal((n, 2))
    p = random_plan(rng, n)
    fd = central_difference(lambda z: gw_objective_loop(cx, naive_pairwise(z), p), y)
    assert _rel_err(gw_gradient_coords(cx, y, p), fd) <= 1e-4


def test_coord_gradient_vanishes_at_isometric_copy():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((8, 2))
    perm = rng.permutation(8)
    cx = pairwise_euclidean(PointCloud(x))
    # y_k = x_{perm^-1(k)}: point i sits at row perm[i]
    y = np.empty_like(x)
    y[perm] = x
    plan = Coupling.from_permutation(perm)
    assert gw_cost(cx, pairwise_euclidean(PointCloud(y)), plan) <= 1e-12
    assert np.linalg.norm(gw_gradient_coords(cx, y, plan)) <= 1e-8


def test_coord_gradient_is_translation_invariant():
    rng = np.random.default_rng(2)
    cx, _ = random_dist(rng, 9)
    g = gw_gradient_coords(cx, rng.standard_normal((9, 3)), random_plan(rng, 9))
    np.testing.assert_allclose(g.sum(axis=0), 0.0, atol=1e-9)


def test_coincident_points_do_not_blow_up():
    cx, _ = random_dist(np.random.default_rng(3), 4)
    y = np.zeros((4, 2))
    g = gw_gradient_coords(cx, y, Coupling.identity(4))
    assert np.all(np.isfinite(g))


def test_align_cases():
    rng = np.random.default_rng(4)
    y = rng.standard_normal((5, 2))
    np.testing.assert_allclose(align_embedding(y, Coupling.identity(5)), y, rtol=1e-15)
    perm = np.array([3, 0, 4, 1, 2])
    np.testing.assert_allclose(align_embedding(y, Coupling.from_permutation(perm)), y[perm], rtol=1e-15)
    centroid = np.array([sum(y[:, 0]) / 5, sum(y[:, 1]) / 5])
    np.testing.assert_allclose(align_embedding(y, Coupling.product(5)), np.tile(centroid, (5, 1)),
                               atol=1e-15)
    np.testing.assert_allclose(align_embedding(y, random_plan(rng, 5)).mean(axis=0), y.mean(axis=0),
                               atol=1e-9)
    with pytest.raises(ShapeMismatchError):
        align_embedding(y, Coupling.identity(4))


def test_already_low_dimensional_input():
    x = np.random.default_rng(5).standard_normal((30, 2))
    cx = pairwise_euclidean(PointCloud(x))
    emb = gw_mds(cx, init_embedding(PointCloud(x), 2, "pca"))
    costs = emb.costs
    assert costs[-1] <= costs[0]
    assert costs[-1] <= 1e-6


def _descends(cx, y0, lr):
    while True:
        try:
            return gw_mds(cx, y0, learning_rate=lr, max_iter=60)
        except DivergenceError:
            lr /= 2


@pytest.mark.parametrize("seed", range(5))
def test_cost_decreases_from_random_start(seed):
    rng = np.random.default_rng(seed)
    cx, _ = random_dist(rng, 25, dim=4)
    emb = _descends(cx, rng.standard_normal((25, 2)), 0.1)
    assert emb.costs[-1] < emb.costs[0]
    assert np.all(np.isfinite(emb.costs))


def test_trace_minimum_late_or_stopped_early():
    x, _ = generate_s_curve(120, seed=3)
    cx = pairwise_euclidean(x)
    emb = gw_mds(cx, init_embedding(x, 2, "pca"), max_iter=200)
    costs = emb.costs
    late = int(np.argmin(costs)) >= int(0.75 * (len(costs) - 1))
    assert emb.info["converged"] or late


def test_divergence_detected():
    rng = np.random.default_rng(6)
    cx, _ = random_dist(rng, 20)
    with pytest.raises(DivergenceError):
        gw_mds(cx, rng.standard_normal((20, 2)), learning_rate=1e4, max_iter=50)


def test_deterministic_trace():
    x, _ = generate_s_curve(80, seed=1)
    cx = pairwise_euclidean(x)
    y0 = init_embedding(x, 2, "randn", 3)
    a = gw_mds(cx, y0, max_iter=40)
    b = gw_mds(cx, y0, max_iter=40)
    assert a.loss_trace == b.loss_trace
    assert a.coords.tobytes() == b.coords.tobytes()


def test_rotated_start_gives_same_trace():
    x, _ = generate_s_curve(80, seed=2)
    cx = pairwise_euclidean(x)
    y0 = init_embedding(x, 2, "pca")
    c, s = np.cos(0.7), np.sin(0.7)
    rotated = y0 @ np.array([[c, -s], [s, c]]).T
    a = gw_mds(cx, y0, max_iter=60)
    b = gw_mds(cx, rotated, max_iter=60)
    assert len(a.costs) == len(b.costs)
    assert np.max(np.abs(a.costs - b.costs)) <= 1e-7
    dy_a = pairwise_euclidean(a.coords)
    dy_b = pairwise_euclidean(b.coords)
    assert abs(pearson_distance_correlation(cx, dy_a) - pearson_distance_correlation(cx, dy_b)) <= 1e-6


def test_callback_sees_every_iteration():
    x, _ = generate_s_curve(40, seed=0)
    states = []
    emb = gw_mds(pairwise_euclidean(x), init_embedding(x, 2), max_iter=15, callback=states.append)
    assert [s.iteration for s in states] == [it for it, _ in emb.loss_trace]
    assert all(isinstance(s, GwMdsState) and s.cost >= 0 and s.grad_norm >= 0 for s in states)


def test_run_gw_mds_geodesic():
    x, _ = generate_s_curve(150, seed=0)
    cfg = ExperimentConfig(dataset="scurve", n=150, metric="geodesic", k=10, max_outer_iters=300)
    emb = run_gw_mds(x, cfg)
    rho = pearson_distance_correlation(emb.info["cost_x"], pairwise_euclidean(emb.coords))
    assert rho >= 0.99
    assert emb.final_plan is not None


def test_rotation_of_points_behind_start_keeps_cost():
    x, _ = generate_s_curve(50, seed=4)
    rot = Rotation.random(random_state=1).as_matrix()
    cx = pairwise_euclidean(x)
    cx_rot = pairwise_euclidean(PointCloud(np.asarray(x) @ rot.T))
    y0 = init_embedding(x, 2, "randn", 0)
    a = gw_mds(cx, y0, max_iter=20).costs
    b = gw_mds(cx_rot, y0, max_iter=20).costs
    np.testing.assert_allclose(a, b, rtol=1e-7, atol=1e-12)
