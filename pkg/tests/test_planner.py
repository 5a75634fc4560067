import pytest

from model_elicitation.annotated import (
    ActionKey,
    concretize,
    enumerate_models,
    ground,
    most_constrained,
    most_relaxed,
)
from model_elicitation.exceptions import (
    PreconditionViolated,
    SearchBudgetExceeded,
    UnknownElement,
)
from model_elicitation.planner import (
    ACTION_INAPPLICABLE,
    GOAL_NOT_REACHED,
    GOAL_REACHED,
    OPTIMISTIC,
    Plan,
    apply,
    execute,
    format_plan,
    optimal_cost,
    parse_plan,
    plan_optimal,
    validate,
)

from .conftest import HAND_TUCKED, IS_CROUCH, atom
from .factories import breadth_first_cost, random_task

TUCK = ActionKey("tuck")
CROUCH = ActionKey("crouch")
MOVE_AB = ActionKey("move", ("roomA", "roomB"))
GOAL = frozenset([atom("(robot-at roomB)")])


def test_apply_tuck(fetch_task, fetch_init):
    state = apply(most_constrained(fetch_task), fetch_init, TUCK)
    assert state == fetch_init | {atom("(is_crouch)"), atom("(hand_tucked)")}


def test_apply_missing_precondition(fetch_task, fetch_init):
    with pytest.raises(PreconditionViolated) as excinfo:
        apply(most_constrained(fetch_task), fetch_init, MOVE_AB)
    assert excinfo.value.missing == {atom("(is_crouch)"), atom("(hand_tucked)")}


def test_execute_semantics(fetch_task, fetch_init):
    model = most_constrained(fetch_task)
    plan = Plan((MOVE_AB,))
    outcome = execute(model, fetch_init, plan, GOAL)
    assert outcome.status == ACTION_INAPPLICABLE
    assert outcome.index == 0
    outcome = execute(model, fetch_init, plan, GOAL, semantics=OPTIMISTIC)
    assert outcome.status == GOAL_NOT_REACHED
    assert outcome.state == fetch_init


def test_tuck_move_is_valid_everywhere(fetch_task, fetch_init):
    plan = Plan((TUCK, MOVE_AB))
    for model in enumerate_models(fetch_task):
        assert execute(model, fetch_init, plan, GOAL).status == GOAL_REACHED


def test_optimal_plans(fetch_task, fetch_init):
    assert plan_optimal(most_relaxed(fetch_task), fetch_init, GOAL) == Plan((MOVE_AB,))
    assert plan_optimal(most_constrained(fetch_task), fetch_init, GOAL) == Plan(
        (TUCK, MOVE_AB)
    )
    crouch_only = concretize(fetch_task, {IS_CROUCH: True, HAND_TUCKED: False})
    plan = plan_optimal(crouch_only, fetch_init, GOAL)
    assert plan.cost == 2
    assert plan == Plan((CROUCH, MOVE_AB))


def test_unsolvable_returns_none(fetch_task, fetch_init):
    model = most_constrained(fetch_task).without([TUCK])
    assert plan_optimal(model, fetch_init, GOAL) is None
    assert optimal_cost(model, fetch_init, GOAL) is None


def test_goal_in_init(fetch_task, fetch_init):
    assert plan_optimal(most_constrained(fetch_task), fetch_init, fetch_init) == Plan()


def test_budget(fetch_task, fetch_init):
    with pytest.raises(SearchBudgetExceeded):
        plan_optimal(most_constrained(fetch_task), fetch_init, GOAL, budget=0)


def test_negative_goal(fetch_task, fetch_init):
    negative = frozenset([atom("(is_crouch)")])
    plan = plan_optimal(most_relaxed(fetch_task), fetch_init, GOAL, negative)
    assert plan == Plan((MOVE_AB,))
    model = most_constrained(fetch_task)
    assert plan_optimal(model, fetch_init, GOAL, negative) is None
    assert not validate(
        most_constrained(fetch_task), fetch_init, GOAL, Plan((TUCK, MOVE_AB)), negative
    )


def test_plan_text(fetch_task):
    plan = parse_plan("1. (tuck)\n2. (move roomA roomB)\n", fetch_task)
    assert plan == Plan((TUCK, MOVE_AB))
    assert format_plan(plan) == "1. (tuck)\n2. (move roomA roomB)\n"
    assert parse_plan(format_plan(plan), fetch_task) == plan
    assert parse_plan("(tuck) (move roomA roomB)", fetch_task) == plan


def test_plan_text_unknown_action(fetch_task):
    with pytest.raises(UnknownElement):
        parse_plan("(fly roomA roomB)", fetch_task)
    with pytest.raises(UnknownElement):
        parse_plan("(move roomA roomC)", fetch_task)


@pytest.mark.parametrize("heuristic", ["hmax", "blind"])
def test_matches_breadth_first_search(rng, heuristic):
    checked = 0
    for _ in range(60):
        task = random_task(rng)
        models = list(enumerate_models(task))
        model = rng.choice(models)
        init, goal = task.problem.init, task.problem.goal
        plan = plan_optimal(model, init, goal, heuristic=heuristic)
        expected = breadth_first_cost(model, init, goal)
        if expected is None:
            assert plan is None
        else:
            assert plan.cost == expected
            assert validate(model, init, goal, plan)
        checked += 1
    assert checked >= 50


def test_blocksworld_plan(blocksworld):
    domain, problem = blocksworld
    task = ground(domain, problem)
    plan = plan_optimal(most_constrained(task), problem.init, problem.goal)
    assert plan.cost == 6
