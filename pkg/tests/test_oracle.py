import pytest

from model_elicitation.annotated import ActionKey, concretize
from model_elicitation.exceptions import OracleAborted
from model_elicitation.forms import AnswerForm
from model_elicitation.oracle import (
    InteractiveOracle,
    SimulatedOracle,
    interactive_answer,
    oracle_factory,
    simulated_answer,
)
from model_elicitation.oracle.answers import (
    Invalid,
    NoUnsolvable,
    PlanAnswer,
    Valid,
    YesSolvable,
    downgrade,
)
from model_elicitation.oracle.interactive import render_query
from model_elicitation.planner import Plan
from model_elicitation.query_gen import generate_all

from .conftest import HAND_TUCKED, IS_CROUCH

TUCK = ActionKey("tuck")
CROUCH = ActionKey("crouch")
MOVE_AB = ActionKey("move", ("roomA", "roomB"))


@pytest.fixture
def queries(fetch_task, fetch_init):
    return generate_all(fetch_task, fetch_init).queries


def scripted(lines):
    lines = list(lines)

    def read(prompt):
        if not lines:
            raise EOFError
        return lines.pop(0)

    return read


def test_downgrade():
    plan_answer = PlanAnswer(Plan((MOVE_AB,)))
    assert downgrade(plan_answer, needs_plan=True) == plan_answer
    assert downgrade(plan_answer, needs_plan=False) == YesSolvable()
    assert downgrade(NoUnsolvable(), needs_plan=False) == NoUnsolvable()


def test_simulated_answers(fetch_task, queries):
    template, validation = queries
    truth = concretize(fetch_task, {IS_CROUCH: True, HAND_TUCKED: False})
    assert simulated_answer(truth, template) == PlanAnswer(Plan((CROUCH, MOVE_AB)))
    assert simulated_answer(truth, validation) == Invalid()
    truth = concretize(fetch_task, {IS_CROUCH: False, HAND_TUCKED: True})
    assert simulated_answer(truth, template) == PlanAnswer(Plan((TUCK, MOVE_AB)))
    assert simulated_answer(truth, validation) == Valid()


def test_simulated_oracle_takes_selection(fetch_task, queries):
    oracle = SimulatedOracle(
        task=fetch_task, truth={IS_CROUCH: False, HAND_TUCKED: False}
    )
    assert oracle.answer(queries[0]) == PlanAnswer(Plan((MOVE_AB,)))


def test_oracle_factory(fetch_task):
    oracle = oracle_factory(
        "simulated", task=fetch_task, truth={IS_CROUCH: True, HAND_TUCKED: True}
    )
    assert isinstance(oracle, SimulatedOracle)
    assert isinstance(oracle_factory("interactive", task=fetch_task), InteractiveOracle)
    with pytest.raises(ValueError):
        oracle_factory("psychic", task=fetch_task)


def test_render_query(queries):
    text = render_query(queries[1])
    assert "(hand_tucked)" in text
    assert "1. (move roomA roomB)" in text
    assert "Answer yes or no." in text
    assert "shortest plan" in render_query(queries[0])


@pytest.mark.parametrize(
    "text,expected",
    [
        ("yes", Valid()),
        ("Y", Valid()),
        ("no", Invalid()),
    ],
)
def test_answer_form_validation(fetch_task, queries, text, expected):
    form = AnswerForm(data={"text": text}, query=queries[1], task=fetch_task)
    assert form.is_valid()
    assert form.answer == expected


def test_answer_form_plan(fetch_task, queries):
    form = AnswerForm(
        data={"text": "(tuck)\n(move roomA roomB)"}, query=queries[0], task=fetch_task
    )
    assert form.is_valid()
    assert form.answer == PlanAnswer(Plan((TUCK, MOVE_AB)))


@pytest.mark.parametrize(
    "text", ["maybe", "yes", "(fly roomA roomB)", ""]
)
def test_answer_form_rejects(fetch_task, queries, text):
    form = AnswerForm(data={"text": text}, query=queries[0], task=fetch_task)
    assert not form.is_valid()
    assert "text" in form.errors


def test_interactive_reprompts(fetch_task, queries):
    written = []
    answer = interactive_answer(
        queries[0],
        render=written.append,
        read=scripted(["(fly roomA roomB)", "", "(tuck)", "(move roomA roomB)", ""]),
        task=fetch_task,
    )
    assert answer == PlanAnswer(Plan((TUCK, MOVE_AB)))
    assert any("unknown action" in text for text in written)


def test_interactive_oracle_transcript_log(fetch_task, queries, tmp_path):
    log = tmp_path / "transcript.txt"
    written = []
    oracle = InteractiveOracle(
        task=fetch_task,
        read=scripted(["no"]),
        write=written.append,
        transcript_log=str(log),
    )
    assert oracle.answer(queries[1]) == Invalid()
    text = log.read_text()
    assert "answer: no" in text
    assert "accepted: no" in text
    assert "".join(written) in text


def test_interactive_end_of_input(fetch_task, queries):
    oracle = InteractiveOracle(
        task=fetch_task, read=scripted([]), write=lambda text: None, transcript_log=""
    )
    with pytest.raises(OracleAborted):
        oracle.answer(queries[1])
