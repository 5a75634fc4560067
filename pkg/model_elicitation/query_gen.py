"""
Construction of distinguishing queries.

Every query is built against a pair of models for its target ``p``: the most
constrained model with ``p`` relaxed and the most relaxed model with ``p``
constrained. Solvability, validity and optimal cost are monotone between
them for positive goals, so a single-target query that separates the two
separates every model with ``p`` relaxed from every model with ``p``
constrained.
"""
import itertools
import logging
from dataclasses import dataclass

from .annotated import (
    ActionKey,
    constrained_minus,
    constraining_value,
    enumerate_models,
    most_constrained,
    presence_label,
    relaxed_plus,
    relaxing_value,
)
from .conf import get_setting
from .exceptions import (
    IllegalAnswer,
    InconsistentOracle,
    PreconditionViolated,
    ScaleExceeded,
    SearchBudgetExceeded,
    UnknownElement,
    UnqueryableCondition,
)
from .landmarks import is_optimal_landmark, landmark_goal
from .oracle.answers import (
    INVALID,
    PLAN,
    PLAN_QUERY_ANSWERS,
    SOLVABLE,
    UNSOLVABLE,
    VALID,
    VALIDATION_ANSWERS,
    downgrade,
)
from .oracle.simulated import simulated_answer
from .pddl import ADD, DEL, PRE
from .planner import Plan, plan_optimal, solvable, validate
from .planning_graph import (
    achievers,
    atoms_mutex,
    build_graph,
    consumers,
    order_unknowns,
)

logger = logging.getLogger(__name__)

PLAN_QUERY = "plan"
VALIDATION_QUERY = "validation"

PRECONDITION_TEMPLATE = "precondition"
ADD_EFFECT_TEMPLATE = "add_effect"


def _atoms_text(atoms):
    if not atoms:
        return "-"
    return " ".join(str(a) for a in sorted(atoms))


@dataclass(frozen=True)
class AnswerPattern:
    kind: str
    max_cost: int = None
    min_cost: int = None
    contains: frozenset = frozenset()
    lacks: frozenset = frozenset()
    # each group needs at least one of its actions in the plan
    contains_any: tuple = ()

    def matches(self, answer):
        if self.kind == SOLVABLE:
            if answer.kind not in (SOLVABLE, PLAN):
                return False
        elif self.kind == PLAN:
            if answer.kind not in (SOLVABLE, PLAN) or answer.plan is None:
                return False
        elif answer.kind != self.kind:
            return False
        plan = answer.plan
        if plan is None:
            return True
        if self.max_cost is not None and plan.cost > self.max_cost:
            return False
        if self.min_cost is not None and plan.cost < self.min_cost:
            return False
        steps = set(plan.steps)
        if not all(group & steps for group in self.contains_any):
            return False
        return self.contains <= steps and not (self.lacks & steps)

    @property
    def contradictory(self):
        if self.contains & self.lacks:
            return True
        return any(group <= self.lacks for group in self.contains_any)

    def __str__(self):
        parts = [self.kind]
        if self.max_cost is not None:
            parts.append("cost<={}".format(self.max_cost))
        if self.min_cost is not None:
            parts.append("cost>={}".format(self.min_cost))
        for key in sorted(self.contains):
            parts.append("containing {}".format(key))
        for group in self.contains_any:
            parts.append(
                "containing one of {}".format(" ".join(str(k) for k in sorted(group)))
            )
        for key in sorted(self.lacks):
            parts.append("without {}".format(key))
        return " ".join(parts)


@dataclass(frozen=True)
class InferenceRow:
    pattern: AnswerPattern
    assignments: tuple

    def __str__(self):
        return "{} => {}".format(
            self.pattern,
            " ".join(
                "{}={}".format(c, presence_label(v)) for c, v in self.assignments
            ),
        )


@dataclass(frozen=True)
class Template:
    kind: str
    condition: object
    host: ActionKey
    partner: ActionKey
    producer: ActionKey = None
    # every ground action that may achieve the queried atom, marker included
    alternatives: frozenset = frozenset()

    @property
    def marker(self):
        """The action whose presence in an answer plan decides the condition."""
        if self.kind == PRECONDITION_TEMPLATE:
            return self.partner
        return self.producer

    @property
    def markers(self):
        return self.alternatives or frozenset((self.marker,))

    @property
    def actions(self):
        return tuple(k for k in (self.host, self.partner, self.producer) if k)

    def __str__(self):
        return "{} {} host={} partner={}{}".format(
            self.kind,
            self.condition,
            self.host,
            self.partner,
            " producer={}".format(self.producer) if self.producer else "",
        )


@dataclass(frozen=True)
class Query:
    kind: str
    init: frozenset
    goal: frozenset
    targets: tuple
    rows: tuple
    plan: Plan = None
    negative_goal: frozenset = frozenset()
    templates: tuple = ()
    synthetic: bool = False

    @property
    def is_template(self):
        return bool(self.templates)

    @property
    def needs_plan(self):
        if self.kind != PLAN_QUERY:
            return False
        return not any(row.pattern.kind == SOLVABLE for row in self.rows)

    @property
    def category(self):
        if self.kind == VALIDATION_QUERY:
            return "val"
        if self.templates:
            return "template"
        return "plan"

    def infer(self, answer):
        legal = PLAN_QUERY_ANSWERS if self.kind == PLAN_QUERY else VALIDATION_ANSWERS
        if answer.kind not in legal:
            raise IllegalAnswer(
                "{} is not a legal answer to a {} query".format(answer.kind, self.kind)
            )
        for row in self.rows:
            if row.pattern.matches(answer):
                return dict(row.assignments)
        raise InconsistentOracle(self, answer)

    def to_text(self):
        lines = [
            "kind: {}".format(self.kind),
            "init: {}".format(_atoms_text(self.init)),
            "goal: {}".format(_atoms_text(self.goal)),
            "negative-goal: {}".format(_atoms_text(self.negative_goal)),
            "plan: {}".format(
                " ".join(str(k) for k in self.plan) if self.plan is not None else "-"
            ),
            "targets: {}".format(" ".join(str(c) for c in self.targets)),
            "templates: {}".format(len(self.templates)),
            "synthetic: {}".format("yes" if self.synthetic else "no"),
            "inference:",
        ]
        lines.extend("  {}".format(row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "kind": self.kind,
            "init": [str(a) for a in sorted(self.init)],
            "goal": [str(a) for a in sorted(self.goal)],
            "negative_goal": [str(a) for a in sorted(self.negative_goal)],
            "plan": [str(k) for k in self.plan] if self.plan is not None else None,
            "targets": [str(c) for c in self.targets],
            "templates": [str(t) for t in self.templates],
            "synthetic": self.synthetic,
            "inference": [str(row) for row in self.rows],
        }


@dataclass(frozen=True)
class QueryPlan:
    queries: tuple
    n: int
    unqueryable: tuple = ()
    order: tuple = ()

    def __iter__(self):
        return iter(self.queries)

    def __len__(self):
        return len(self.queries)

    def count(self, category):
        return sum(1 for q in self.queries if q.category == category)

    def to_text(self):
        parts = ["queries: {} for {} condition(s)\n".format(len(self.queries), self.n)]
        for number, query in enumerate(self.queries, 1):
            parts.append("\n[query {}]\n".format(number))
            parts.append(query.to_text())
        for error in self.unqueryable:
            parts.append("\nunqueryable: {}\n".format(error))
        return "".join(parts)


def _row(pattern, *assignments):
    return InferenceRow(pattern, tuple(assignments))


def _solvability_rows(p, cost):
    relaxing = (p, relaxing_value(p))
    constraining = (p, constraining_value(p))
    return (
        _row(AnswerPattern(SOLVABLE, max_cost=cost), relaxing),
        _row(AnswerPattern(UNSOLVABLE), constraining),
        _row(AnswerPattern(PLAN, min_cost=cost + 1), constraining),
    )


def _validation_rows(p):
    return (
        _row(AnswerPattern(VALID), (p, relaxing_value(p))),
        _row(AnswerPattern(INVALID), (p, constraining_value(p))),
    )


def project(init_e, plan, model):
    """
    Regress ``plan`` to the atoms of ``init_e`` it depends on.

    Returns ``(init_q, init_temp)``; ``init_temp`` starts as a mutable copy
    of ``init_q``.
    """
    init_e = frozenset(init_e)
    state = init_e
    established = set()
    needed = set()
    for key in plan:
        action = model.action(key)
        missing = action.pre - state
        if missing:
            raise PreconditionViolated(key, missing)
        needed |= action.pre - established
        state = (state - action.delete) | action.add
        established = (established - action.delete) | action.add
    init_q = frozenset(needed & init_e)
    return init_q, set(init_q)


def _guarded_predicates(task):
    return {c.atom.predicate for c in task.conditions if c.slot in (ADD, DEL)}


def _separates(minus, plus, init, goal, plan):
    return validate(minus, init, goal, plan) and not validate(plus, init, goal, plan)


def _check_budget(budget):
    limit = get_setting("ELICITATION_CHECK_BUDGET")
    if budget is None:
        return limit
    return min(budget, limit)


def _plan_query_separates(minus, plus, init, goal, negative, key, budget):
    """
    The host must stay an optimal landmark in ``minus`` and the goal must be
    unreachable in ``plus``. Proving the latter searches a model with every
    unknown relaxed, so it runs under the check budget and gives up
    (falling back to validation) when that is spent.
    """
    if not is_optimal_landmark(minus, init, goal, key, negative, budget=budget):
        logger.debug("%s is not an optimal landmark, no plan query", key)
        return False
    try:
        return not solvable(plus, init, goal, negative, _check_budget(budget))
    except SearchBudgetExceeded as exc:
        logger.debug("Gave up proving unsolvability: %s", exc)
        return False


def qga(init_e, task, p, a_p, template=None, minus=None, plus=None, budget=None):
    """
    Build a query for ``p`` hosted by the ground action ``a_p``.

    Returns ``None`` when neither a plan query nor a validation query built
    from ``init_e`` separates the two halves of the model space.
    """
    if template is not None:
        return template_query(task, template, init_e, budget=budget)
    minus = minus or constrained_minus(task, p)
    plus = plus or relaxed_plus(task, p)
    key = a_p.key
    pa = a_p.atom_for(p)
    host = minus.action(key)
    if p.slot == PRE and pa in host.pre:
        raise UnqueryableCondition(p, "{} requires {} regardless".format(key, pa))
    if p.slot == DEL and pa in host.add:
        raise UnqueryableCondition(p, "{} adds {} regardless".format(key, pa))

    plan = plan_optimal(minus, init_e, host.pre, budget=budget)
    if plan is None:
        raise UnqueryableCondition(
            p, "preconditions of {} are unreachable".format(key)
        )
    full = plan.append(key)
    init_q, init_temp = project(init_e, full, minus)

    goal = set(host.add) - init_q
    if p.slot == ADD and pa in init_q:
        raise UnqueryableCondition(p, "{} already holds".format(pa))
    if p.slot == DEL:
        init_q = init_q | {pa}
        init_temp.add(pa)
        goal.add(pa)
    if not goal:
        raise UnqueryableCondition(p, "{} achieves nothing new".format(key))
    goal = frozenset(goal)

    guarded = _guarded_predicates(task)
    negative = set()
    for step in plan:
        action = minus.action(step)
        if not action.add & goal:
            continue
        sides = sorted(
            f
            for f in action.add - host.add
            if f.predicate not in guarded and f not in init_temp
        )
        if sides:
            negative.add(sides[0])
    negative = frozenset(negative)

    for step in plan:
        init_temp |= minus.action(step).add & host.pre
    init_temp = frozenset(init_temp)

    resolved = plan_optimal(minus, init_temp, goal, negative, budget=budget)
    if resolved is not None and _plan_query_separates(
        minus, plus, init_temp, goal, negative, key, budget
    ):
        logger.debug("Plan query for %s via %s", p, key)
        return Query(
            kind=PLAN_QUERY,
            init=init_temp,
            goal=goal,
            targets=(p,),
            rows=_solvability_rows(p, resolved.cost),
            negative_goal=negative,
        )
    candidates = []
    if resolved is not None:
        candidates.append((init_temp, resolved))
    candidates.append((init_q, full))
    for init, carried in candidates:
        if _separates(minus, plus, init, goal, carried):
            logger.debug("Validation query for %s via %s", p, key)
            return Query(
                kind=VALIDATION_QUERY,
                init=init,
                goal=goal,
                targets=(p,),
                rows=_validation_rows(p),
                plan=carried,
            )
    return None


def synthetic_query(task, p, a_p, minus=None, plus=None):
    """
    Validation of the single action ``a_p`` from its own preconditions.
    """
    minus = minus or constrained_minus(task, p)
    plus = plus or relaxed_plus(task, p)
    pa = a_p.atom_for(p)
    host = minus.action(a_p.key)
    init = set(host.pre)
    if p.slot == DEL:
        if pa in host.add:
            return None
        init.add(pa)
    elif pa in init:
        return None
    goal = set(host.add) - init
    if p.slot == DEL:
        goal.add(pa)
    plan = Plan((a_p.key,))
    init, goal = frozenset(init), frozenset(goal)
    if not _separates(minus, plus, init, goal, plan):
        return None
    return Query(
        kind=VALIDATION_QUERY,
        init=init,
        goal=goal,
        targets=(p,),
        rows=_validation_rows(p),
        plan=plan,
        synthetic=True,
    )


def _host_instances(task, condition, graph):
    def sort_key(action):
        level = graph.action_first.get(action.key)
        return (level is None, level or 0, action.key)

    return sorted(task.instances(condition), key=sort_key)


def build_query(task, p, init_e, graph=None, budget=None):
    if graph is None:
        graph = build_graph(most_constrained(task), init_e)
    minus = constrained_minus(task, p)
    plus = relaxed_plus(task, p)
    instances = _host_instances(task, p, graph)
    limit = get_setting("ELICITATION_INSTANCE_CANDIDATES")
    reasons = []
    for instance in instances[:limit]:
        try:
            query = qga(
                init_e, task, p, instance, minus=minus, plus=plus, budget=budget
            )
        except UnqueryableCondition as exc:
            reasons.append(exc.reason)
            continue
        except SearchBudgetExceeded as exc:
            logger.warning("Search for %s via %s stopped: %s", p, instance.key, exc)
            reasons.append("{}: {}".format(instance.key, exc))
            continue
        if query is not None:
            return query
        reasons.append("{} does not separate".format(instance.key))
    if get_setting("ELICITATION_SYNTHETIC_FALLBACK"):
        for instance in instances:
            query = synthetic_query(task, p, instance, minus=minus, plus=plus)
            if query is not None:
                logger.warning(
                    "Using a synthetic initial state for %s via %s", p, instance.key
                )
                return query
    raise UnqueryableCondition(
        p, "; ".join(reasons) or "no ground instance of {}".format(p.schema)
    )


TEMPLATE_CANDIDATES = 2


def _by_level(graph, keys):
    return sorted(keys, key=lambda k: (graph.action_first[k], k))


def _adders(task, pa, exclude=frozenset()):
    """
    Ground actions that add ``pa`` in some model, certainly or possibly.
    """
    return frozenset(
        a.key
        for a in task.actions
        if a.key not in exclude and (pa in a.add or pa in a.possible_atoms(ADD))
    )


def _precondition_template(task, graph, model, condition, instance, pa):
    if pa not in graph.facts:
        return None
    host_pre = model.action(instance.key).pre - {pa}
    for partner in _by_level(graph, achievers(graph, pa)):
        if atoms_mutex(graph, model.action(partner).pre | host_pre):
            logger.debug("%s is mutex with %s", partner, instance.key)
            continue
        return Template(
            PRECONDITION_TEMPLATE,
            condition,
            instance.key,
            partner,
            alternatives=_adders(task, pa),
        )
    return None


def _add_effect_template(task, graph, model, condition, instance, pa):
    if pa not in graph.facts:
        return None
    hosts = frozenset(
        a.key for a in task.instances(condition) if a.atom_for(condition) == pa
    )
    host_pre = model.action(instance.key).pre
    users = _by_level(graph, consumers(graph, pa) - hosts)
    for producer in _by_level(graph, achievers(graph, pa) - hosts):
        producer_pre = model.action(producer).pre
        for consumer in users:
            if consumer == producer:
                continue
            atoms = (model.action(consumer).pre - {pa}) | host_pre
            if atoms_mutex(graph, atoms) or atoms_mutex(graph, atoms | producer_pre):
                continue
            return Template(
                ADD_EFFECT_TEMPLATE,
                condition,
                instance.key,
                consumer,
                producer,
                alternatives=_adders(task, pa, exclude=hosts),
            )
    return None


def detect_templates(task, init_e, graph=None, limit=TEMPLATE_CANDIDATES):
    """
    Up to ``limit`` candidate templates per condition, one per reachable host
    instance, lowest planning-graph level first.
    """
    model = most_constrained(task)
    if graph is None:
        graph = build_graph(model, init_e)
    templates = []
    for condition in task.conditions:
        if condition.slot == DEL:
            continue
        found = 0
        for instance in _host_instances(task, condition, graph):
            if found >= limit or instance.key not in graph.action_first:
                break
            host = model.action(instance.key)
            if host.add <= host.pre:
                continue
            pa = instance.atom_for(condition)
            if condition.slot == PRE:
                detect = _precondition_template
            else:
                detect = _add_effect_template
            template = detect(task, graph, model, condition, instance, pa)
            if template is not None:
                templates.append(template)
                found += 1
    return templates


def _plan_using(keys):
    keys = frozenset(keys)
    if len(keys) == 1:
        return AnswerPattern(PLAN, contains=keys)
    return AnswerPattern(PLAN, contains_any=(keys,))


def template_query(task, template, init_e, budget=None):
    p = template.condition
    pa = task.action(template.host).atom_for(p)
    markers = template.markers
    if template.kind == PRECONDITION_TEMPLATE:
        model = most_constrained(task)
        prefix_goal = model.action(template.partner).pre | model.action(
            template.host
        ).pre
        tail = (template.host,)
        present_row = _plan_using(markers)
        absent_row = AnswerPattern(PLAN, lacks=markers)
        final = template.host
    else:
        model = constrained_minus(task, p)
        prefix_goal = model.action(template.host).pre | (
            model.action(template.partner).pre - {pa}
        )
        tail = (template.host, template.partner)
        present_row = AnswerPattern(PLAN, lacks=markers)
        absent_row = _plan_using(markers)
        final = template.partner

    plan = plan_optimal(model, init_e, prefix_goal, budget=budget)
    if plan is None:
        return None
    full = plan
    for key in tail:
        full = full.append(key)
    try:
        init_q, _init_temp = project(init_e, full, model)
    except PreconditionViolated:
        return None
    # the queried atom must be earned inside the answer plan
    init_q = init_q - {pa}
    try:
        goal = landmark_goal(model.action(final)) - init_q
    except UnqueryableCondition:
        return None
    if not goal:
        return None
    return Query(
        kind=PLAN_QUERY,
        init=init_q,
        goal=frozenset(goal),
        targets=(p,),
        rows=(_row(present_row, (p, True)), _row(absent_row, (p, False))),
        templates=(template,),
    )


def is_distinguishing(query, p, task, limit=None, budget=None):
    """
    Brute force over every concrete model: true if the answer each model
    gives places ``p`` exactly where that model has it.

    Searches run under ``ELICITATION_CHECK_BUDGET``; a model whose answer
    cannot be computed within it counts as not distinguished.
    """
    limit = limit or get_setting("ELICITATION_MERGE_CHECK_LIMIT")
    if 2**task.n > limit:
        raise ScaleExceeded(
            "{} models exceed the brute-force limit {}".format(2**task.n, limit)
        )
    budget = _check_budget(budget)
    for model in enumerate_models(task):
        try:
            answer = simulated_answer(model, query, budget=budget)
        except SearchBudgetExceeded:
            logger.debug("No answer for %s within %d expansions", model, budget)
            return False
        answer = downgrade(answer, query.needs_plan)
        try:
            assignments = query.infer(answer)
        except (IllegalAnswer, InconsistentOracle):
            return False
        if assignments.get(p) != model.selection[p]:
            return False
    return True


def _template_actions(query):
    return {key for template in query.templates for key in template.actions}


def _queried_atoms(task, query):
    return {
        task.action(t.host).atom_for(t.condition)
        for t in query.templates
        if t.condition.slot != DEL
    }


def _interacts(first, second, graph, task):
    model = graph.model
    first_actions = _template_actions(first)
    second_actions = _template_actions(second)
    for a, b in itertools.product(sorted(first_actions), sorted(second_actions)):
        if a == b:
            continue
        try:
            if _pair_mutex(graph, a, b):
                return True
        except UnknownElement:
            return True
        for x, y in ((a, b), (b, a)):
            if model.action(x).delete & model.action(y).pre:
                return True
    for actions, other in ((first_actions, second), (second_actions, first)):
        targets = _queried_atoms(task, other)
        for key in actions:
            if key in _template_actions(other):
                continue
            if model.action(key).add & targets:
                return True
    return False


def _pair_mutex(graph, a, b):
    level = len(graph.action_levels) - 1
    if a not in graph.action_levels[level] or b not in graph.action_levels[level]:
        raise UnknownElement("{} or {} not in graph".format(a, b))
    return frozenset((a, b)) in graph.action_mutexes(level)


def _combine(first, second):
    rows = []
    for r1, r2 in itertools.product(first.rows, second.rows):
        pattern = AnswerPattern(
            PLAN,
            contains=r1.pattern.contains | r2.pattern.contains,
            lacks=r1.pattern.lacks | r2.pattern.lacks,
            contains_any=r1.pattern.contains_any + r2.pattern.contains_any,
        )
        if pattern.contradictory:
            continue
        rows.append(
            InferenceRow(
                pattern,
                r1.assignments + r2.assignments,
            )
        )
    return Query(
        kind=PLAN_QUERY,
        init=first.init | second.init,
        goal=first.goal | second.goal,
        targets=first.targets + second.targets,
        rows=tuple(rows),
        templates=first.templates + second.templates,
    )


def merge_queries(queries, graph, task):
    """
    Greedily merge template queries without destructive interactions.
    Merges are kept only when the product table distinguishes every target.
    """
    merged = []
    for query in queries:
        for index, existing in enumerate(merged):
            if _interacts(existing, query, graph, task):
                continue
            candidate = _combine(existing, query)
            try:
                exact = all(
                    is_distinguishing(candidate, t, task) for t in candidate.targets
                )
            except ScaleExceeded:
                exact = False
            if exact:
                logger.info(
                    "Merged template queries for %s",
                    ", ".join(str(t) for t in candidate.targets),
                )
                merged[index] = candidate
                break
            logger.warning(
                "Merged query for %s does not distinguish its targets",
                ", ".join(str(t) for t in candidate.targets),
            )
        else:
            merged.append(query)
    return merged


def _first_distinguishing(task, templates, init_e, budget):
    for template in templates:
        try:
            query = template_query(task, template, init_e, budget=budget)
        except SearchBudgetExceeded as exc:
            logger.debug("Template %s gave up: %s", template, exc)
            continue
        if query is not None and is_distinguishing(query, template.condition, task):
            return query
        logger.debug("Template %s does not distinguish", template)
    return None


def generate_all(task, init_e, ordering=None, budget=None):
    init_e = frozenset(init_e)
    if task.n == 0:
        return QueryPlan(queries=(), n=0)
    ordering = ordering or get_setting("ELICITATION_ORDERING_MODEL")
    graph = build_graph(most_constrained(task), init_e)
    order = order_unknowns(
        task, init_e, ordering=ordering, graph=graph if ordering != "join" else None
    )
    use_templates = 2**task.n <= get_setting("ELICITATION_MERGE_CHECK_LIMIT")
    templates = {}
    if use_templates:
        for template in detect_templates(task, init_e, graph):
            templates.setdefault(template.condition, []).append(template)

    template_queries, queries, flagged = [], [], []
    for p in order:
        query = _first_distinguishing(task, templates.get(p, ()), init_e, budget)
        if query is not None:
            template_queries.append(query)
            continue
        try:
            queries.append(build_query(task, p, init_e, graph=graph, budget=budget))
        except UnqueryableCondition as exc:
            logger.warning("Condition %s is unqueryable: %s", p, exc.reason)
            flagged.append(exc)

    position = {c: i for i, c in enumerate(order)}
    queries.extend(merge_queries(template_queries, graph, task))
    queries.sort(key=lambda q: min(position[t] for t in q.targets))
    logger.info(
        "Generated %d queries for %d conditions of %s",
        len(queries),
        task.n,
        task.domain.name,
    )
    return QueryPlan(
        queries=tuple(queries),
        n=task.n,
        unqueryable=tuple(flagged),
        order=tuple(order),
    )
