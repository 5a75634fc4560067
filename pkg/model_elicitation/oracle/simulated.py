import logging

from ..annotated import concretize
from ..planner import plan_optimal, validate
from .answers import Invalid, NoUnsolvable, PlanAnswer, Valid
from .base import BaseOracle

logger = logging.getLogger(__name__)


def simulated_answer(truth, query, budget=None):
    """
    Answer ``query`` as an optimal planner holding the model ``truth``.
    """
    if query.kind == "validation":
        if validate(truth, query.init, query.goal, query.plan, query.negative_goal):
            return Valid()
        return Invalid()
    plan = plan_optimal(
        truth, query.init, query.goal, query.negative_goal, budget=budget
    )
    if plan is None:
        return NoUnsolvable()
    return PlanAnswer(plan)


class SimulatedOracle(BaseOracle):
    name = "simulated"

    def __init__(self, task=None, truth=None, budget=None, **kwargs):
        super().__init__(task=task, **kwargs)
        if isinstance(truth, dict):
            truth = concretize(task, truth, label="truth")
        self.truth = truth
        self.budget = budget

    def answer(self, query):
        answer = simulated_answer(self.truth, query, budget=self.budget)
        logger.debug("Simulated oracle answered %s", answer)
        return answer
