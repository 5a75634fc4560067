from dataclasses import dataclass

SOLVABLE = "solvable"
UNSOLVABLE = "unsolvable"
PLAN = "plan"
VALID = "valid"
INVALID = "invalid"

PLAN_QUERY_ANSWERS = (SOLVABLE, UNSOLVABLE, PLAN)
VALIDATION_ANSWERS = (VALID, INVALID)


@dataclass(frozen=True)
class Answer:
    kind = ""

    @property
    def plan(self):
        return None

    def __str__(self):
        return self.kind


@dataclass(frozen=True)
class YesSolvable(Answer):
    kind = SOLVABLE
    given_plan: object = None

    @property
    def plan(self):
        return self.given_plan

    def __str__(self):
        return "yes"


@dataclass(frozen=True)
class NoUnsolvable(Answer):
    kind = UNSOLVABLE

    def __str__(self):
        return "no"


@dataclass(frozen=True)
class PlanAnswer(Answer):
    kind = PLAN
    given_plan: object = None

    @property
    def plan(self):
        return self.given_plan

    def __str__(self):
        return str(self.given_plan)


@dataclass(frozen=True)
class Valid(Answer):
    kind = VALID

    def __str__(self):
        return "yes"


@dataclass(frozen=True)
class Invalid(Answer):
    kind = INVALID

    def __str__(self):
        return "no"


def downgrade(answer, needs_plan):
    """
    Reduce a plan answer to yes when the query only asks for solvability.
    """
    if needs_plan or answer.kind != PLAN:
        return answer
    return YesSolvable()
