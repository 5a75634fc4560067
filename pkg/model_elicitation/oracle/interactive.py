import logging
import sys

from django.template.loader import render_to_string

from ..conf import get_setting
from ..exceptions import OracleAborted
from .base import BaseOracle

logger = logging.getLogger(__name__)

PROMPT_TEMPLATE = "model_elicitation/prompt/query.txt"
SINGLE_LINE_ANSWERS = ("yes", "y", "no", "n", "empty", "()")


def render_query(query, number=None):
    return render_to_string(
        PROMPT_TEMPLATE,
        {
            "query": query,
            "number": number,
            "init": [str(a) for a in sorted(query.init)],
            "goal": [str(a) for a in sorted(query.goal)],
            "negative_goal": [str(a) for a in sorted(query.negative_goal)],
            "plan": [str(k) for k in query.plan] if query.plan is not None else [],
            "is_validation": query.kind == "validation",
        },
    )


def _read_answer(read):
    """
    A single ``yes``/``no`` line, or action lines up to a blank line.
    """
    try:
        first = read("> ")
    except EOFError:
        raise OracleAborted("Input ended before the answer") from None
    if first.strip().lower() in SINGLE_LINE_ANSWERS:
        return first.strip()
    lines = [first]
    while first.strip():
        try:
            first = read("> ")
        except EOFError:
            break
        lines.append(first)
    return "\n".join(line for line in lines if line.strip())


def interactive_answer(query, render, read, task, echo=None):
    """
    Prompt until the typed text is a well-formed answer to ``query``.
    """
    from ..forms import AnswerForm

    render(render_query(query))
    while True:
        text = _read_answer(read)
        if echo is not None:
            echo(text)
        form = AnswerForm(data={"text": text}, query=query, task=task)
        if form.is_valid():
            return form.answer
        for errors in form.errors.values():
            for error in errors:
                render("{}\n".format(error))


class InteractiveOracle(BaseOracle):
    name = "interactive"

    def __init__(self, task=None, read=None, write=None, transcript_log=None, **kwargs):
        super().__init__(task=task, **kwargs)
        self.read = read or input
        self.write = write or sys.stdout.write
        if transcript_log is None:
            transcript_log = get_setting("ELICITATION_TRANSCRIPT_LOG")
        self.transcript_log = transcript_log
        self.asked = 0

    def _log(self, text):
        if not self.transcript_log:
            return
        with open(self.transcript_log, "a", encoding="utf-8") as f:
            f.write(text if text.endswith("\n") else text + "\n")

    def _render(self, text):
        self.write(text)
        self._log(text)

    def answer(self, query):
        self.asked += 1
        logger.debug("Asking question %d", self.asked)
        answer = interactive_answer(
            query,
            render=self._render,
            read=self.read,
            task=self.task,
            echo=lambda text: self._log("answer: {}".format(text)),
        )
        self._log("accepted: {}".format(answer))
        return answer
