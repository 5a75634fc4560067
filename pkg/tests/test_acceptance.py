import pytest

from model_elicitation.experiments import (
    BUNDLED_DOMAINS,
    bundled_config,
    evaluate_seed,
    run_experiment,
)

pytestmark = pytest.mark.slow

RUNS = [(name, k) for name in BUNDLED_DOMAINS for k in (4, 6)]


@pytest.fixture(scope="module")
def rows():
    return {(name, k): run_experiment(bundled_config(name, k))[0] for name, k in RUNS}


@pytest.mark.parametrize("name,k", RUNS)
def test_bundled_domain_is_recovered(rows, name, k):
    row = rows[(name, k)]
    assert row.seeds == tuple(range(10))
    assert k - 2 <= row.avg_queries <= k


@pytest.mark.parametrize("name", BUNDLED_DOMAINS)
def test_bundled_domain_merges_templates(rows, name):
    assert sum(rows[(name, k)].merges for k in (4, 6)) >= 1


def test_budget_exhaustion_falls_back_to_validation():
    result = evaluate_seed(bundled_config("blocksworld", 6, seeds=(8,)), 8)
    assert result.queries <= 6


def test_query_count_ignores_problem_size():
    averages = [
        run_experiment(bundled_config("rover", 4, problem=problem))[0].avg_queries
        for problem in ("problem.pddl", "problem-x2.pddl", "problem-x3.pddl")
    ]
    assert max(averages) - min(averages) <= 1
