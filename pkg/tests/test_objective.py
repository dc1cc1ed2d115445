import numpy as np
import pytest

from sno.services.objective import (
    FUNCTIONS,
    BudgetExhausted,
    EvaluationBudget,
    Evaluator,
    Problem,
    ProblemNotFoundError,
    TargetReached,
    budget_delta,
    evaluate,
    repair_bounds,
)


@pytest.mark.parametrize("name", sorted(FUNCTIONS))
@pytest.mark.parametrize("dimension", [1, 2, 10, 30])
def test_known_optimum_value(name, dimension):
    problem = Problem.from_name(name, dimension)
    value = problem.function(problem.known_optimizer())
    assert abs(value - problem.optimum_value) <= 1e-12


def test_rosenbrock_optimizer_is_all_ones():
    problem = Problem.from_name("rosenbrock", 5)
    np.testing.assert_array_equal(problem.known_optimizer(), np.ones(5))
    assert problem.function(np.ones(5)) == 0.0


def test_functions_are_positive_away_from_optimum():
    for name, function in FUNCTIONS.items():
        assert function(np.full(3, 0.5)) > 0.0, name


def test_ackley_uses_its_own_box():
    problem = Problem.from_name("ackley", 3)
    np.testing.assert_array_equal(problem.lower, np.full(3, -30.0))
    np.testing.assert_array_equal(problem.upper, np.full(3, 30.0))
    assert Problem.from_name("ackley", 3, bound=5.0).upper[0] == 5.0


def test_unknown_problem():
    with pytest.raises(ProblemNotFoundError):
        Problem.from_name("schwefel", 2)


def test_invalid_bounds_rejected():
    with pytest.raises(ValueError):
        Problem("bad", 2, np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0.0, FUNCTIONS["sphere"])


def test_evaluate_counts_every_call():
    problem = Problem.from_name("sphere", 2)
    budget = EvaluationBudget(fes_max=10)
    assert evaluate(problem, np.zeros(2), budget) == 0.0
    assert budget.fes == 1
    evaluate(problem, np.ones(2), budget)
    assert budget.fes == 2


@pytest.mark.parametrize("value, expected", [(5.0, 5.0), (35.0, 30.0), (-40.0, -30.0)])
def test_repair_bounds_clamps(value, expected):
    problem = Problem.from_name("ackley", 1)
    assert repair_bounds(np.array([value]), problem)[0] == expected


def test_repair_bounds_is_idempotent(rng):
    problem = Problem.from_name("ackley", 4)
    point = rng.uniform(-100, 100, 4)
    once = repair_bounds(point, problem)
    np.testing.assert_array_equal(repair_bounds(once, problem), once)


@pytest.mark.parametrize("fes, expected", [(100_000, 0.5), (0, 0.0), (200_000, 1.0)])
def test_budget_delta(fes, expected):
    assert budget_delta(EvaluationBudget(fes_max=200_000, fes=fes)) == expected


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        EvaluationBudget(fes_max=0)


def test_evaluator_stops_at_budget():
    evaluator = Evaluator(Problem.from_name("sphere", 2), EvaluationBudget(fes_max=3))
    for _ in range(3):
        evaluator.evaluate(np.ones(2), "init")
    with pytest.raises(BudgetExhausted):
        evaluator.evaluate(np.ones(2), "region_search")
    assert evaluator.budget.fes == 3


def test_evaluator_stops_once_target_reached():
    evaluator = Evaluator(Problem.from_name("sphere", 2), EvaluationBudget(fes_max=100))
    evaluator.evaluate(np.zeros(2), "init")
    # 初始化阶段不提前终止
    evaluator.evaluate(np.ones(2), "init")
    with pytest.raises(TargetReached):
        evaluator.evaluate(np.ones(2), "point_search")
    assert evaluator.budget.fes == 2


def test_evaluator_tracks_best_and_phases():
    evaluator = Evaluator(Problem.from_name("sphere", 2), EvaluationBudget(fes_max=100))
    evaluator.evaluate(np.array([2.0, 0.0]), "init")
    evaluator.evaluate(np.array([1.0, 0.0]), "region_search")
    evaluator.evaluate(np.array([3.0, 0.0]), "space_net")

    assert evaluator.best_value == 1.0
    np.testing.assert_array_equal(evaluator.best_position, [1.0, 0.0])
    assert evaluator.phase_evaluations == {
        "init": 1, "region_search": 1, "point_search": 0, "space_net": 1, "population": 0,
    }
    assert evaluator.budget.fes == 3
