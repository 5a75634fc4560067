import pytest

from model_elicitation.annotated import (
    ActionKey,
    enumerate_models,
    ground,
    most_constrained,
    most_relaxed,
)
from model_elicitation.exceptions import (
    IllegalAnswer,
    InconsistentOracle,
    ScaleExceeded,
)
from model_elicitation.oracle.answers import (
    Invalid,
    NoUnsolvable,
    PlanAnswer,
    Valid,
    YesSolvable,
)
from model_elicitation.pddl import Atom, PossibleCondition, parse_domain, parse_problem
from model_elicitation.planner import Plan, optimal_cost, plan_optimal, validate
from model_elicitation import query_gen
from model_elicitation.query_gen import (
    PLAN_QUERY,
    PRECONDITION_TEMPLATE,
    VALIDATION_QUERY,
    build_query,
    detect_templates,
    generate_all,
    is_distinguishing,
    project,
    qga,
    template_query,
)

from .conftest import HAND_TUCKED, IS_CROUCH, atom, load
from .factories import random_task

TUCK = ActionKey("tuck")
CROUCH = ActionKey("crouch")
KNEEL = ActionKey("kneel")
MOVE_AB = ActionKey("move", ("roomA", "roomB"))
AT_A = atom("(robot-at roomA)")
AT_B = atom("(robot-at roomB)")

LIFT_DOMAIN = """
(define (domain fetch-lift)
  (:requirements :strips :typing)
  (:types location)
  (:predicates (robot-at ?l - location) (is_crouch) (hand_tucked)
               (arm_ready) (lifted))
  (:action tuck
    :parameters ()
    :precondition ()
    :effect (and (is_crouch) (hand_tucked)))
  (:action crouch
    :parameters ()
    :precondition ()
    :effect (is_crouch))
  (:action prepare
    :parameters ()
    :precondition ()
    :effect (arm_ready))
  (:action lift
    :parameters ()
    :precondition ()
    :possible-precondition (arm_ready)
    :effect (lifted))
  (:action move
    :parameters (?from ?to - location)
    :precondition (robot-at ?from)
    :possible-precondition (and (is_crouch) (hand_tucked))
    :effect (and (robot-at ?to) (not (robot-at ?from)))))
"""

LIFT_PROBLEM = """
(define (problem fetch-lift)
  (:domain fetch-lift)
  (:objects roomA roomB - location)
  (:init (robot-at roomA))
  (:goal (and (robot-at roomB) (lifted))))
"""

KNEEL_DOMAIN = """
(define (domain fetch-kneel)
  (:requirements :strips :typing)
  (:types location)
  (:predicates (robot-at ?l - location) (is_crouch))
  (:action crouch
    :parameters ()
    :precondition ()
    :effect (is_crouch))
  (:action kneel
    :parameters ()
    :precondition ()
    :effect (is_crouch))
  (:action move
    :parameters (?from ?to - location)
    :precondition (robot-at ?from)
    :possible-precondition (is_crouch)
    :effect (and (robot-at ?to) (not (robot-at ?from)))))
"""

KNEEL_PROBLEM = """
(define (problem fetch-kneel)
  (:domain fetch-kneel)
  (:objects roomA roomB - location)
  (:init (robot-at roomA))
  (:goal (robot-at roomB)))
"""

JUMP_DOMAIN = """
(define (domain fetch-jump)
  (:requirements :strips :typing)
  (:types location)
  (:predicates (robot-at ?l - location) (hand_tucked))
  (:action jump
    :parameters (?from ?to - location)
    :precondition (robot-at ?from)
    :effect (and (robot-at ?to) (not (robot-at ?from))))
  (:action move
    :parameters (?from ?to - location)
    :precondition (robot-at ?from)
    :possible-precondition (hand_tucked)
    :effect (and (robot-at ?to) (not (robot-at ?from)))))
"""


def without_tuck():
    domain, problem = load("fetch")
    domain = domain.replace_schemas(s for s in domain.schemas if s.name != "tuck")
    return ground(domain, problem), problem.init


def test_motivating_example(fetch_task, fetch_init):
    query_plan = generate_all(fetch_task, fetch_init)
    assert len(query_plan) == 2
    assert query_plan.order == (HAND_TUCKED, IS_CROUCH)
    first, second = query_plan.queries

    assert first.category == "template"
    assert first.targets == (HAND_TUCKED,)
    assert first.init == {AT_A}
    assert first.goal == {AT_B}
    assert first.needs_plan
    assert first.infer(PlanAnswer(Plan((TUCK, MOVE_AB)))) == {HAND_TUCKED: True}
    assert first.infer(PlanAnswer(Plan((MOVE_AB,)))) == {HAND_TUCKED: False}

    assert second.kind == VALIDATION_QUERY
    assert second.targets == (IS_CROUCH,)
    assert second.init == {AT_A, atom("(hand_tucked)")}
    assert second.goal == {AT_B}
    assert second.plan == Plan((MOVE_AB,))
    assert second.infer(Valid()) == {IS_CROUCH: False}
    assert second.infer(Invalid()) == {IS_CROUCH: True}


def test_plan_query_without_tuck():
    task, init = without_tuck()
    instance = task.action(MOVE_AB)
    query = qga(init, task, HAND_TUCKED, instance)
    assert query.kind == PLAN_QUERY
    assert query.init == {AT_A, atom("(is_crouch)")}
    assert query.goal == {AT_B}
    assert not query.needs_plan
    assert query.infer(YesSolvable()) == {HAND_TUCKED: False}
    assert query.infer(NoUnsolvable()) == {HAND_TUCKED: True}
    assert is_distinguishing(query, HAND_TUCKED, task)


def test_illegal_answer():
    task, init = without_tuck()
    query = qga(init, task, HAND_TUCKED, task.action(MOVE_AB))
    with pytest.raises(IllegalAnswer):
        query.infer(Valid())


def test_answer_matching_no_row(fetch_task, fetch_init):
    query = generate_all(fetch_task, fetch_init).queries[0]
    with pytest.raises(InconsistentOracle):
        query.infer(NoUnsolvable())


def test_validation_when_tuck_is_present(fetch_task, fetch_init):
    query = build_query(fetch_task, IS_CROUCH, fetch_init)
    assert query.kind == VALIDATION_QUERY
    assert is_distinguishing(query, IS_CROUCH, fetch_task)


def test_project_drops_unused_atoms(fetch_task):
    init_e = {atom("(is_crouch)"), atom("(hand_tucked)"), AT_A, Atom("junk")}
    init_q, init_temp = project(init_e, Plan((MOVE_AB,)), most_constrained(fetch_task))
    assert init_q == {atom("(is_crouch)"), atom("(hand_tucked)"), AT_A}
    assert init_temp == set(init_q)


def test_detect_templates(fetch_task, fetch_init):
    templates = detect_templates(fetch_task, fetch_init)
    found = {(t.condition, t.host): t for t in templates}
    assert len(found) == len(templates)
    assert {t.condition for t in templates} == {HAND_TUCKED, IS_CROUCH}
    template = found[(HAND_TUCKED, MOVE_AB)]
    assert template.kind == PRECONDITION_TEMPLATE
    assert template.condition == HAND_TUCKED
    assert template.host == MOVE_AB
    assert template.partner == TUCK
    assert template.marker == TUCK
    crouching = found[(IS_CROUCH, MOVE_AB)]
    assert crouching.partner == CROUCH
    assert crouching.markers == {CROUCH, TUCK}


def test_template_rows_cover_every_achiever(fetch_task, fetch_init):
    template = next(
        t
        for t in detect_templates(fetch_task, fetch_init)
        if t.condition == IS_CROUCH and t.host == MOVE_AB
    )
    query = template_query(fetch_task, template, fetch_init)
    assert query.init == {AT_A}
    assert query.goal == {AT_B}
    assert query.infer(PlanAnswer(Plan((CROUCH, MOVE_AB)))) == {IS_CROUCH: True}
    assert query.infer(PlanAnswer(Plan((TUCK, MOVE_AB)))) == {IS_CROUCH: True}
    assert query.infer(PlanAnswer(Plan((MOVE_AB,)))) == {IS_CROUCH: False}
    # tuck also sets hand_tucked, so its presence says nothing about is_crouch
    assert not is_distinguishing(query, IS_CROUCH, fetch_task)


def test_template_with_several_achievers():
    domain = parse_domain(KNEEL_DOMAIN)
    problem = parse_problem(KNEEL_PROBLEM, domain)
    task = ground(domain, problem)
    query_plan = generate_all(task, problem.init)
    (query,) = query_plan.queries
    assert query.category == "template"
    assert query.targets == (IS_CROUCH,)
    assert query.infer(PlanAnswer(Plan((KNEEL, MOVE_AB)))) == {IS_CROUCH: True}
    assert query.infer(PlanAnswer(Plan((CROUCH, MOVE_AB)))) == {IS_CROUCH: True}
    assert query.infer(PlanAnswer(Plan((MOVE_AB,)))) == {IS_CROUCH: False}
    assert is_distinguishing(query, IS_CROUCH, task)
    assert "containing one of (crouch) (kneel)" in query.to_text()


def test_template_queries_merge():
    domain = parse_domain(LIFT_DOMAIN)
    problem = parse_problem(LIFT_PROBLEM, domain)
    task = ground(domain, problem)
    query_plan = generate_all(task, problem.init)
    assert query_plan.count("template") == 1
    merged = [q for q in query_plan if q.is_template][0]
    assert set(merged.targets) == {
        HAND_TUCKED,
        PossibleCondition("lift", "pre", Atom("arm_ready")),
    }
    assert len(query_plan) == 2
    for query in query_plan:
        for target in query.targets:
            assert is_distinguishing(query, target, task)


def test_no_templates_above_check_limit(fetch_task, fetch_init, settings):
    settings.ELICITATION_MERGE_CHECK_LIMIT = 2
    query_plan = generate_all(fetch_task, fetch_init)
    assert query_plan.count("template") == 0
    assert len(query_plan) == 2
    with pytest.raises(ScaleExceeded):
        is_distinguishing(query_plan.queries[0], HAND_TUCKED, fetch_task)


def test_unannotated_task_has_no_queries(blocksworld):
    domain, problem = blocksworld
    query_plan = generate_all(ground(domain, problem), problem.init)
    assert len(query_plan) == 0
    assert query_plan.to_text() == "queries: 0 for 0 condition(s)\n"


def test_query_text(fetch_task, fetch_init):
    text = generate_all(fetch_task, fetch_init).to_text()
    assert text.startswith("queries: 2 for 2 condition(s)\n")
    assert "kind: validation" in text
    assert "plan: (move roomA roomB)" in text


def test_generated_queries_distinguish(rng):
    checked = 0
    for _ in range(25):
        task = random_task(rng, possible=rng.randint(1, 5))
        init = task.problem.init
        query_plan = generate_all(task, init)
        assert len(query_plan) <= task.n
        for query in query_plan:
            for target in query.targets:
                assert is_distinguishing(query, target, task)
                checked += 1
    assert checked > 0


def _cost(model, init, goal):
    cost = optimal_cost(model, init, goal)
    return float("inf") if cost is None else cost


def test_model_ordering(rng):
    samples = 0
    while samples < 100:
        task = random_task(rng, possible=rng.randint(1, 4))
        atoms = sorted(task.atoms)
        init = frozenset(rng.sample(atoms, rng.randint(0, 2)))
        goal = frozenset(rng.sample(atoms, rng.randint(1, 2)))
        con, rel = most_constrained(task), most_relaxed(task)
        con_plan = plan_optimal(con, init, goal)
        for model in enumerate_models(task):
            assert _cost(rel, init, goal) <= _cost(model, init, goal)
            assert _cost(model, init, goal) <= _cost(con, init, goal)
            if con_plan is not None:
                assert validate(model, init, goal, con_plan)
                assert validate(rel, init, goal, con_plan)
            samples += 1


def test_no_plan_query_when_host_is_avoidable():
    domain = parse_domain(JUMP_DOMAIN)
    problem = parse_problem(KNEEL_PROBLEM.replace("fetch-kneel", "fetch-jump"), domain)
    task = ground(domain, problem)
    (condition,) = task.conditions
    query = build_query(task, condition, problem.init)
    assert query.kind == VALIDATION_QUERY
    assert MOVE_AB in query.plan.steps
    assert query.infer(Valid()) == {condition: False}
    assert is_distinguishing(query, condition, task)


def test_plan_query_needs_an_optimal_landmark(monkeypatch):
    task, init = without_tuck()
    monkeypatch.setattr(query_gen, "is_optimal_landmark", lambda *args, **kw: False)
    query = qga(init, task, HAND_TUCKED, task.action(MOVE_AB))
    assert query.kind == VALIDATION_QUERY
    assert is_distinguishing(query, HAND_TUCKED, task)


def test_unsolvability_check_gives_up(settings):
    settings.ELICITATION_CHECK_BUDGET = 0
    task, init = without_tuck()
    query = qga(init, task, HAND_TUCKED, task.action(MOVE_AB))
    assert query.kind == VALIDATION_QUERY
    assert query.plan == Plan((MOVE_AB,))
    assert query.infer(Invalid()) == {HAND_TUCKED: True}


def test_distinguishing_check_respects_budget(fetch_task, fetch_init):
    query = generate_all(fetch_task, fetch_init).queries[0]
    assert is_distinguishing(query, HAND_TUCKED, fetch_task)
    assert not is_distinguishing(query, HAND_TUCKED, fetch_task, budget=0)
