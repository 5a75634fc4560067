import random

import pytest

from model_elicitation.annotated import ground
from model_elicitation.experiments import DOMAINS_DIR
from model_elicitation.pddl import (
    Atom,
    PossibleCondition,
    parse_domain,
    parse_problem,
)

HAND_TUCKED = PossibleCondition("move", "pre", Atom("hand_tucked"))
IS_CROUCH = PossibleCondition("move", "pre", Atom("is_crouch"))


def load(name, problem="problem.pddl"):
    domain = parse_domain((DOMAINS_DIR / name / "domain.pddl").read_text())
    return domain, parse_problem((DOMAINS_DIR / name / problem).read_text(), domain)


def atom(text):
    parts = text.strip("()").split()
    return Atom(parts[0], tuple(parts[1:]))


@pytest.fixture
def fetch():
    return load("fetch")


@pytest.fixture
def fetch_task(fetch):
    domain, problem = fetch
    return ground(domain, problem)


@pytest.fixture
def fetch_init(fetch):
    return fetch[1].init


@pytest.fixture
def blocksworld():
    return load("blocksworld")


@pytest.fixture
def rng():
    return random.Random(1234)
