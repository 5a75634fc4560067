import logging

from .exceptions import UnqueryableCondition, UnsolvableTask
from .planner import optimal_cost

logger = logging.getLogger(__name__)


def _base_cost(model, init, goal, negative_goal, budget):
    cost = optimal_cost(model, init, goal, negative_goal, budget=budget)
    if cost is None:
        raise UnsolvableTask("No plan reaches {} in {}".format(len(goal), model))
    return cost


def is_action_landmark(model, init, goal, key, negative_goal=frozenset(), budget=None):
    """
    True if every valid plan contains ``key``, decided by removing the
    action and testing solvability.
    """
    _base_cost(model, init, goal, negative_goal, budget)
    reduced = model.without((key,))
    return optimal_cost(reduced, init, goal, negative_goal, budget=budget) is None


def is_optimal_landmark(model, init, goal, key, negative_goal=frozenset(), budget=None):
    """
    True if every optimal plan contains ``key``.
    """
    cost = _base_cost(model, init, goal, negative_goal, budget)
    reduced = optimal_cost(
        model.without((key,)), init, goal, negative_goal, budget=budget
    )
    return reduced is None or reduced > cost


def landmark_goal(action, excluded=None):
    """
    Goal that forces ``action`` into plans: its add effects, without the
    queried atom when that atom is a possible add effect.
    """
    goal = frozenset(action.add) - {excluded}
    if not goal:
        raise UnqueryableCondition(
            str(action.key), "action has no add effect to use as a goal"
        )
    return goal
