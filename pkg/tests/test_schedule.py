import math

import numpy as np
import pytest

from sno.core.schedule import (
    attracted_count,
    best_value_weight,
    branch_probability,
    lambda_adjust,
    population_size,
    population_sizes,
    region_candidate_count,
    rho_from_draw,
    tournament_probability,
)


@pytest.mark.parametrize("delta, a, b, expected", [(0.5, 1, 2, 1.5), (0.0, 3, 7, 3), (1.0, 2, 1, 1)])
def test_lambda_adjust(delta, a, b, expected):
    assert lambda_adjust(delta, a, b) == expected


def test_lambda_adjust_matches_straight_line(rng):
    for _ in range(200):
        delta, a, b = rng.random(), rng.normal(), rng.normal()
        assert lambda_adjust(delta, a, b) == pytest.approx(a * (1 - delta) + b * delta, rel=1e-12, abs=1e-12)


def test_region_candidate_count_endpoints():
    assert region_candidate_count(0.0, 64) == 64
    assert region_candidate_count(1.0, 64) == 7
    assert region_candidate_count(0.0, 64, mode="grow") == 7
    assert region_candidate_count(1.0, 64, mode="grow") == 64


def test_region_candidate_count_shrinks():
    counts = [region_candidate_count(d, 64) for d in np.linspace(0, 1, 101)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))
    assert region_candidate_count(1.0, 1) == 1


def test_weights():
    assert tournament_probability(0.0) == pytest.approx(0.1)
    assert tournament_probability(1.0) == 1.0
    assert best_value_weight(0.0) == 2.0
    assert best_value_weight(1.0) == 1.0


def test_attracted_count():
    assert attracted_count(1.0, 5, 81) == 5
    assert attracted_count(0.0, 5, 81) == 1
    assert attracted_count(1e-9, 5, 81) == 1
    assert attracted_count(0.5, 5, 81) == 3
    assert attracted_count(1.0, 10, 4) == 4


def test_rho_from_draw_range():
    assert rho_from_draw(0.0, 0.7) == pytest.approx(0.1)
    assert rho_from_draw(1.0, 0.7) == pytest.approx(0.7)
    for phi in np.linspace(0, 0.999, 50):
        assert 0.1 <= rho_from_draw(phi, 0.7) <= 0.7


def test_population_size_endpoints():
    assert population_size(0.0, 190, 38) == 190
    assert population_size(1.0, 190, 38) == 38
    assert population_size(0.25, 190, 38) == 114
    assert population_sizes(1.0, (190, 38), (19, 38)) == (38, 38)


def test_population_size_matches_straight_line(rng):
    for _ in range(200):
        delta = rng.random()
        progress = delta ** (1 - math.sqrt(delta))
        assert population_size(delta, 190, 38) == int(round(190 + progress * (38 - 190)))


def test_population_schedule_is_monotone():
    sizes = [population_size(d, 190, 38) for d in np.linspace(0, 1, 201)]
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))
    miners = [population_size(d, 19, 38) for d in np.linspace(0, 1, 201)]
    assert all(a <= b for a, b in zip(miners, miners[1:]))


def test_branch_probability():
    assert branch_probability(0.0, 2.5) == 0.0
    assert branch_probability(1.0, 2.0) == 1.0
    assert branch_probability(0.5, 2.0) == 0.25


def test_region_branch_favoured_over_point_branch():
    for delta in np.linspace(0.0, 1.0, 101):
        assert branch_probability(delta, 2.0) >= branch_probability(delta, 2.5)
