"""
Optimal planning, plan execution and validation over concrete models.
"""
import heapq
import logging
import re
from dataclasses import dataclass
from typing import NamedTuple

from .annotated import ActionKey
from .conf import get_setting
from .exceptions import (
    PreconditionViolated,
    SearchBudgetExceeded,
    UnknownElement,
)
from .pddl import Atom

logger = logging.getLogger(__name__)

OPTIMISTIC = "optimistic"
PESSIMISTIC = "pessimistic"

GOAL_REACHED = "goal-reached"
ACTION_INAPPLICABLE = "action-inapplicable"
GOAL_NOT_REACHED = "goal-not-reached"

PLAN_STEP_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Plan:
    steps: tuple = ()

    @property
    def cost(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __contains__(self, key):
        return key in self.steps

    def __str__(self):
        return "<{}>".format(", ".join(str(step) for step in self.steps))

    def append(self, key):
        return Plan(self.steps + (key,))


@dataclass(frozen=True)
class PlanOutcome:
    status: str
    state: frozenset
    index: int = None

    @property
    def reached(self):
        return self.status == GOAL_REACHED


class _Operator(NamedTuple):
    key: ActionKey
    pre: frozenset
    add: frozenset
    delete: frozenset


def negation_atom(atom):
    return Atom("!" + atom.predicate, atom.args)


def apply(model, state, key):
    action = model.action(key)
    missing = action.pre - state
    if missing:
        raise PreconditionViolated(key, missing)
    return (frozenset(state) - action.delete) | action.add


def execute(model, init, plan, goal=frozenset(), semantics=PESSIMISTIC):
    state = frozenset(init)
    for index, key in enumerate(plan):
        if not model.has_action(key):
            return PlanOutcome(ACTION_INAPPLICABLE, state, index)
        action = model.action(key)
        missing = action.pre - state
        if missing:
            if semantics == OPTIMISTIC and missing <= _soft_preconditions(model, key):
                logger.debug("Skipping %s, missing %s", key, len(missing))
                continue
            return PlanOutcome(ACTION_INAPPLICABLE, state, index)
        state = (state - action.delete) | action.add
    if goal <= state:
        return PlanOutcome(GOAL_REACHED, state)
    return PlanOutcome(GOAL_NOT_REACHED, state)


def _soft_preconditions(model, key):
    if not model.task.has_action(key):
        return frozenset()
    return model.task.action(key).possible_atoms("pre")


def validate(model, init, goal, plan, negative_goal=frozenset()):
    outcome = execute(model, init, plan, goal=frozenset(goal))
    if not outcome.reached:
        return False
    return not (outcome.state & frozenset(negative_goal))


def _operators(model, negative_goal):
    """
    Positive operators, with every negative goal atom compiled into an
    auxiliary atom maintained by the actions that touch it.
    """
    operators = []
    for action in model.actions:
        add, delete = action.add, action.delete
        if negative_goal:
            add = add | {negation_atom(a) for a in action.delete & negative_goal}
            delete = delete | {negation_atom(a) for a in action.add & negative_goal}
            add = add - {negation_atom(a) for a in action.add & negative_goal}
        operators.append(_Operator(action.key, action.pre, add, delete))
    return operators


def _reachable(operators, init):
    reached = set(init)
    remaining = list(operators)
    usable = []
    changed = True
    while changed:
        changed = False
        pending = []
        for op in remaining:
            if op.pre <= reached:
                usable.append(op)
                if not op.add <= reached:
                    reached |= op.add
                changed = True
            else:
                pending.append(op)
        remaining = pending
    return reached, usable


def _relevant(operators, goal):
    relevant = set(goal)
    selected = {}
    changed = True
    while changed:
        changed = False
        for op in operators:
            if op.key in selected:
                continue
            if op.add & relevant:
                selected[op.key] = op
                if not op.pre <= relevant:
                    relevant |= op.pre
                changed = True
    ops = sorted(selected.values(), key=lambda op: op.key)
    return frozenset(relevant), ops


def h_max(state, operators, goal):
    """
    Max-cost of ``goal`` in the delete relaxation with unit costs, or
    ``None`` when the goal is unreachable from ``state``.
    """
    if goal <= state:
        return 0
    known = set(state)
    level = 0
    remaining = operators
    while True:
        level += 1
        new = set()
        pending = []
        for op in remaining:
            if op.pre <= known:
                new |= op.add
            else:
                pending.append(op)
        new -= known
        if not new:
            return None
        known |= new
        if goal <= known:
            return level
        remaining = pending


def _blind(state, operators, goal):
    return 0


HEURISTICS = {"hmax": h_max, "blind": _blind}


def plan_optimal(
    model, init, goal, negative_goal=frozenset(), budget=None, heuristic=None
):
    """
    Return a minimum-length plan or ``None`` if the task is unsolvable.

    Ties between equally good plans are broken by the lexicographic order
    of their action sequences.
    """
    if budget is None:
        budget = get_setting("ELICITATION_SEARCH_BUDGET")
    estimate = HEURISTICS[heuristic or get_setting("ELICITATION_HEURISTIC")]
    negative_goal = frozenset(negative_goal)
    init = frozenset(init)
    goal = frozenset(goal) | {negation_atom(a) for a in negative_goal}
    init = init | {negation_atom(a) for a in negative_goal if a not in init}

    operators = _operators(model, negative_goal)
    reached, usable = _reachable(operators, init)
    if not goal <= reached:
        return None
    relevant, operators = _relevant(usable, goal)
    start = init & relevant
    h = estimate(start, operators, goal)
    if h is None:
        return None

    frontier = [(h, h, (), start)]
    best = {start: 0}
    closed = set()
    expanded = 0
    while frontier:
        _f, _h, path, state = heapq.heappop(frontier)
        if state in closed:
            continue
        if goal <= state:
            logger.debug(
                "Found plan of cost %d after %d expansions", len(path), expanded
            )
            return Plan(path)
        closed.add(state)
        expanded += 1
        if expanded > budget:
            raise SearchBudgetExceeded(expanded)
        g = len(path) + 1
        for op in operators:
            if not op.pre <= state:
                continue
            successor = ((state - op.delete) | op.add) & relevant
            if successor in closed or best.get(successor, g + 1) <= g:
                continue
            h = estimate(successor, operators, goal)
            if h is None:
                continue
            best[successor] = g
            heapq.heappush(frontier, (g + h, h, path + (op.key,), successor))
    return None


def solvable(model, init, goal, negative_goal=frozenset(), budget=None):
    return plan_optimal(model, init, goal, negative_goal, budget=budget) is not None


def optimal_cost(model, init, goal, negative_goal=frozenset(), budget=None):
    plan = plan_optimal(model, init, goal, negative_goal, budget=budget)
    if plan is None:
        return None
    return plan.cost


def parse_plan(text, task):
    steps = []
    for match in PLAN_STEP_RE.finditer(text):
        parts = match.group(1).split()
        if not parts:
            raise UnknownElement("empty action ()")
        key = ActionKey(parts[0], tuple(parts[1:]))
        if not task.has_action(key):
            raise UnknownElement("unknown action %s" % (key,))
        steps.append(key)
    return Plan(tuple(steps))


def format_plan(plan):
    return "".join(
        "{}. {}\n".format(number, step) for number, step in enumerate(plan, 1)
    )
