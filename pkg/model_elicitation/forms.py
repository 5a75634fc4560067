from django import forms
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from .exceptions import UnknownElement
from .oracle.answers import (
    Invalid,
    NoUnsolvable,
    PlanAnswer,
    Valid,
    YesSolvable,
)
from .planner import PLAN_STEP_RE, Plan, parse_plan

YES = ("yes", "y")
NO = ("no", "n")
EMPTY_PLAN = ("empty", "()")


class AnswerForm(forms.Form):
    text = forms.CharField(
        label=_("Answer"),
        error_messages={"required": _("Please type an answer.")},
    )

    def __init__(self, *args, **kwargs):
        self.query = kwargs.pop("query")
        self.task = kwargs.pop("task")
        super().__init__(*args, **kwargs)

    def clean_text(self):
        text = self.cleaned_data["text"].strip()
        lowered = text.lower()
        if self.query.kind == "validation":
            if lowered in YES:
                return Valid()
            if lowered in NO:
                return Invalid()
            raise ValidationError(_("Please answer yes or no."))

        if lowered in NO:
            return NoUnsolvable()
        if lowered in YES:
            if self.query.needs_plan:
                raise ValidationError(
                    _("This question needs the plan, one action per line.")
                )
            return YesSolvable()
        if lowered in EMPTY_PLAN:
            return PlanAnswer(Plan())
        if not PLAN_STEP_RE.search(text):
            raise ValidationError(
                _("Please answer yes, no or type actions like (move a b).")
            )
        try:
            plan = parse_plan(text, self.task)
        except UnknownElement as e:
            raise ValidationError(str(e))
        return PlanAnswer(plan)

    @property
    def answer(self):
        return self.cleaned_data["text"]
