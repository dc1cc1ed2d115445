import numpy as np
import pytest

from sno.services.spacenet import (
    RegionTable,
    SpaceNet,
    TopologyError,
    build_grid_topology,
    compute_expected_values,
    nearest_elastic_points,
    record_region_visit,
    top_rho_pool,
)


def _two_regions(visits_a, visits_b, prev, current_best):
    """两个区域、互不共享角点的手工拓扑"""
    corners = np.array([[0, 1, 2, 3], [4, 5, 6, 7]])
    regions = RegionTable(
        corners=corners,
        visits_a=np.asarray(visits_a),
        visits_b=np.asarray(visits_b),
        prev_corner_objectives=np.asarray(prev, dtype=float),
        alpha=np.full(2, 0.5),
        beta=np.full(2, 0.1),
    )
    return regions, np.asarray(current_best, dtype=float)


def test_grid_sizes():
    regions = build_grid_topology(81)
    assert regions.h == 64
    assert regions.corners.shape == (64, 4)
    assert build_grid_topology(4).corners.tolist() == [[0, 1, 2, 3]]


def test_interior_point_belongs_to_four_regions():
    net = SpaceNet(np.zeros((81, 2)), np.zeros(81), 0.5, 0.1)
    assert len(net.memberships[4 * 9 + 4]) == 4
    assert len(net.memberships[0]) == 1
    assert len(net.memberships[4]) == 2
    assert all(1 <= len(m) <= 4 for m in net.memberships)


def test_corners_are_grid_neighbours():
    regions = build_grid_topology(25)
    for corners in regions.corners:
        rows_cols = [divmod(int(c), 5) for c in corners]
        rows = {r for r, _ in rows_cols}
        cols = {c for _, c in rows_cols}
        assert len(rows) == 2 and len(cols) == 2
        assert max(rows) - min(rows) == 1 and max(cols) - min(cols) == 1


def test_best_corner_per_region():
    regions = build_grid_topology(9)
    objectives = np.array([5.0, 1.0, 9.0, 3.0, 2.0, 9.0, 9.0, 9.0, 0.0])
    assert regions.best_corner_ids(objectives).tolist() == [1, 1, 4, 8]


@pytest.mark.parametrize("n_p", [0, 3, 10, 80])
def test_invalid_grid(n_p):
    with pytest.raises(TopologyError):
        build_grid_topology(n_p)


def test_expected_values_hand_fixture():
    # 区域 A: 访问比 2, 改进量 4, 最佳角点 0; 区域 B: 访问比 1, 改进量 0, 最佳角点 10
    objectives = np.array([0.0, 1.0, 1.0, 1.0, 10.0, 10.0, 10.0, 10.0])
    regions, _ = _two_regions(
        visits_a=[1, 2], visits_b=[2, 2],
        prev=[[1.0, 2.0, 2.0, 2.0], [10.0, 10.0, 10.0, 10.0]],
        current_best=[0.0, 10.0],
    )
    e = compute_expected_values(regions, objectives, 0.0)
    assert e[0] == pytest.approx(4.0)
    assert e[1] == pytest.approx(0.0)


def test_expected_values_degenerate_normalization():
    regions = build_grid_topology(9)
    objectives = np.ones(9)
    regions.prev_corner_objectives = objectives[regions.corners].copy()
    for delta, weight in [(0.0, 2.0), (1.0, 1.0), (0.5, 1.5)]:
        e = compute_expected_values(regions, objectives, delta)
        np.testing.assert_allclose(e, 0.5 + 0.5 + weight * 0.5)


def test_expected_values_match_straight_line(rng):
    for _ in range(100):
        regions = build_grid_topology(16)
        objectives = rng.normal(size=16)
        regions.visits_a = rng.integers(1, 20, regions.h)
        regions.visits_b = rng.integers(1, 20, regions.h)
        regions.prev_corner_objectives = objectives[regions.corners] + rng.random((regions.h, 4))
        delta = rng.random()

        ratio = regions.visits_b / regions.visits_a
        improvement = np.array([sum(regions.prev_corner_objectives[k][c] - objectives[regions.corners[k][c]]
                                    for c in range(4)) for k in range(regions.h)])
        best = np.array([min(objectives[c] for c in regions.corners[k]) for k in range(regions.h)])

        def norm(v):
            return (v - v.min()) / (v.max() - v.min()) if v.max() > v.min() else np.full(v.size, 0.5)

        expected = norm(ratio) + norm(improvement) + (2 + delta * (1 - 2)) * (1 - norm(best))
        np.testing.assert_allclose(compute_expected_values(regions, objectives, delta), expected,
                                   rtol=1e-12, atol=1e-12)


def test_record_region_visit():
    regions = build_grid_topology(9)
    record_region_visit(regions, 0)
    assert regions.visits_a.tolist() == [2, 1, 1, 1]
    assert regions.visits_b.tolist() == [1, 2, 2, 2]


def test_visit_ratio_after_repeated_selection():
    regions = build_grid_topology(9)
    k = 6
    for _ in range(k):
        record_region_visit(regions, 0)
    assert regions.visits_b[0] / regions.visits_a[0] == pytest.approx(1 / (k + 1))


def test_nearest_elastic_points():
    positions = np.array([[0.0], [1.0], [5.0]])
    assert nearest_elastic_points(np.array([0.9]), 2, positions).tolist() == [1, 0]
    assert nearest_elastic_points(np.array([5.0]), 1, positions).tolist() == [2]
    assert sorted(nearest_elastic_points(np.array([2.0]), 3, positions).tolist()) == [0, 1, 2]


def test_nearest_elastic_points_ties_prefer_lower_index():
    positions = np.array([[1.0], [-1.0], [3.0]])
    assert nearest_elastic_points(np.zeros(1), 2, positions).tolist() == [0, 1]


def test_top_rho_pool(rng):
    objectives = rng.permutation(81).astype(float)
    pool = top_rho_pool(objectives, 0.1)
    assert pool.size == 8
    assert set(objectives[pool]) == set(range(8))
    assert top_rho_pool(objectives, 0.001).tolist() == [int(np.argmin(objectives))]
    assert top_rho_pool(objectives, 1.0).size == 81


def test_expected_values_refresh_previous_objectives():
    net = SpaceNet(np.zeros((9, 2)), np.arange(9, dtype=float), 0.5, 0.1)
    first = net.expected_values(0.0)
    # 首轮改进量全为 0
    assert np.all(np.isfinite(first))
    net.replace(0, np.ones(2), -5.0)
    second = net.expected_values(0.1)
    assert int(np.argmax(second)) == 0
    assert net.memberships[0] == [0]
    np.testing.assert_array_equal(net.regions.prev_corner_objectives, net.objectives[net.regions.corners])


def test_replace_only_on_improvement():
    net = SpaceNet(np.zeros((4, 1)), np.array([1.0, 2.0, 3.0, 4.0]), 0.5, 0.1)
    assert not net.replace(0, np.ones(1), 1.0)
    assert net.positions[0, 0] == 0.0
    assert net.replace(0, np.ones(1), 0.5)
    assert net.positions[0, 0] == 1.0 and net.objectives[0] == 0.5


def test_snapshot_rows():
    net = SpaceNet(np.arange(18, dtype=float).reshape(9, 2), np.arange(9, dtype=float), 0.5, 0.1)
    rows = net.snapshot_rows()
    assert len(rows) == 9
    assert (rows[5]["row"], rows[5]["col"]) == (1, 2)
    np.testing.assert_array_equal(rows[5]["position"], [10.0, 11.0])
