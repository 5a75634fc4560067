"""
Leveled planning graph with pairwise mutexes.
"""
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from .annotated import join_model, most_constrained
from .conf import get_setting
from .exceptions import UnknownElement
from .pddl import Atom

logger = logging.getLogger(__name__)


class _Node(NamedTuple):
    key: object
    pre: frozenset
    add: frozenset
    delete: frozenset


def _noop(fact):
    return _Node(("noop", fact), frozenset((fact,)), frozenset((fact,)), frozenset())


def _pair(x, y):
    return frozenset((x, y))


def _interferes(a, b):
    return bool(a.delete & (b.pre | b.add) or b.delete & (a.pre | a.add))


def _competing(a, b, fact_mutex):
    for p in a.pre:
        for q in b.pre:
            if p != q and _pair(p, q) in fact_mutex:
                return True
    return False


def _nodes_mutex(a, b, fact_mutex):
    if a.key == b.key:
        return False
    return _interferes(a, b) or _competing(a, b, fact_mutex)


def _has_mutex_pair(atoms, fact_mutex):
    atoms = sorted(atoms)
    for i, p in enumerate(atoms):
        for q in atoms[i + 1 :]:
            if _pair(p, q) in fact_mutex:
                return True
    return False


@dataclass(eq=False)
class LeveledGraph:
    model: object
    init: frozenset
    fact_levels: list = field(default_factory=list)
    action_levels: list = field(default_factory=list)
    fact_mutexes: list = field(default_factory=list)
    fact_first: dict = field(default_factory=dict)
    action_first: dict = field(default_factory=dict)

    def __post_init__(self):
        self._action_mutex_cache = {}

    @property
    def final_level(self):
        return len(self.fact_levels) - 1

    @property
    def facts(self):
        return self.fact_levels[-1]

    @property
    def actions(self):
        if not self.action_levels:
            return frozenset()
        return self.action_levels[-1]

    def level_of(self, element):
        if isinstance(element, Atom):
            return self.fact_first.get(element)
        return self.action_first.get(element)

    def _clamp(self, level):
        return min(level, self.final_level)

    def action_mutexes(self, level):
        level = min(level, len(self.action_levels) - 1)
        if level < 0:
            return frozenset()
        if level not in self._action_mutex_cache:
            fact_mutex = self.fact_mutexes[level]
            nodes = sorted(self.action_levels[level])
            pairs = set()
            for i, a in enumerate(nodes):
                node_a = _as_node(self.model.action(a))
                for b in nodes[i + 1 :]:
                    node_b = _as_node(self.model.action(b))
                    if _nodes_mutex(node_a, node_b, fact_mutex):
                        pairs.add(_pair(a, b))
            self._action_mutex_cache[level] = frozenset(pairs)
        return self._action_mutex_cache[level]


def _as_node(action):
    return _Node(action.key, action.pre, action.add, action.delete)


def build_graph(model, init):
    """
    Expand levels until both the fact set and the fact mutexes are stable.
    """
    facts = frozenset(init)
    graph = LeveledGraph(model=model, init=facts)
    graph.fact_levels.append(facts)
    graph.fact_mutexes.append(frozenset())
    graph.fact_first.update({f: 0 for f in facts})
    nodes = [_as_node(a) for a in model.actions]

    level = 0
    while True:
        fact_mutex = graph.fact_mutexes[level]
        layer = [
            node
            for node in nodes
            if node.pre <= facts and not _has_mutex_pair(node.pre, fact_mutex)
        ]
        graph.action_levels.append(frozenset(node.key for node in layer))
        for node in layer:
            graph.action_first.setdefault(node.key, level)

        achievers = {}
        for fact in facts:
            achievers.setdefault(fact, []).append(_noop(fact))
        for node in layer:
            for fact in node.add:
                achievers.setdefault(fact, []).append(node)
        next_facts = frozenset(achievers)

        cache = {}

        def nodes_mutex(a, b):
            pair = (a.key, b.key) if str(a.key) <= str(b.key) else (b.key, a.key)
            if pair not in cache:
                cache[pair] = _nodes_mutex(a, b, fact_mutex)
            return cache[pair]

        candidates = set(fact_mutex)
        new_facts = sorted(next_facts - facts)
        ordered = sorted(next_facts)
        for f in new_facts:
            for g in ordered:
                if f != g:
                    candidates.add(_pair(f, g))
        next_mutex = set()
        for pair in candidates:
            f, g = sorted(pair)
            if all(nodes_mutex(a, b) for a in achievers[f] for b in achievers[g]):
                next_mutex.add(pair)
        next_mutex = frozenset(next_mutex)

        if next_facts == facts and next_mutex == fact_mutex:
            break
        level += 1
        facts = next_facts
        graph.fact_levels.append(facts)
        graph.fact_mutexes.append(next_mutex)
        for fact in new_facts:
            graph.fact_first[fact] = level

    logger.debug(
        "Planning graph for %s leveled off at %d with %d facts",
        model,
        graph.final_level,
        len(graph.facts),
    )
    return graph


def _check_fact(graph, fact, level=None):
    facts = graph.facts if level is None else graph.fact_levels[graph._clamp(level)]
    if fact not in facts:
        raise UnknownElement("{} not in graph".format(fact))


def achievers(graph, fact):
    _check_fact(graph, fact)
    return frozenset(k for k in graph.actions if fact in graph.model.action(k).add)


def consumers(graph, fact):
    _check_fact(graph, fact)
    return frozenset(k for k in graph.actions if fact in graph.model.action(k).pre)


def mutex(graph, x, y, level):
    if isinstance(x, Atom) != isinstance(y, Atom):
        raise UnknownElement("cannot compare a fact with an action")
    if isinstance(x, Atom):
        _check_fact(graph, x, level)
        _check_fact(graph, y, level)
        if x == y:
            return False
        return _pair(x, y) in graph.fact_mutexes[graph._clamp(level)]
    action_level = min(level, len(graph.action_levels) - 1)
    for key in (x, y):
        if action_level < 0 or key not in graph.action_levels[action_level]:
            raise UnknownElement("{} not in graph".format(key))
    if x == y:
        return False
    return _pair(x, y) in graph.action_mutexes(action_level)


def atoms_mutex(graph, atoms):
    """True if some pair of ``atoms`` is mutex at the final level."""
    return _has_mutex_pair(atoms, graph.fact_mutexes[-1]) or not (
        frozenset(atoms) <= graph.facts
    )


@dataclass(frozen=True)
class UnknownOrder:
    conditions: tuple
    levels: dict
    unreachable: frozenset

    def __iter__(self):
        return iter(self.conditions)

    def __len__(self):
        return len(self.conditions)

    def __getitem__(self, index):
        return self.conditions[index]


def ordering_model(task, ordering=None):
    ordering = ordering or get_setting("ELICITATION_ORDERING_MODEL")
    if ordering == "join":
        return join_model(task)
    return most_constrained(task)


def order_unknowns(task, init, ordering=None, graph=None):
    """
    Sort conditions by the first level at which an action hosting them
    appears. Conditions whose host is unreachable come last.
    """
    if graph is None:
        graph = build_graph(ordering_model(task, ordering), init)
    levels = {}
    unreachable = set()
    for condition in task.conditions:
        found = [
            graph.action_first[a.key]
            for a in task.instances(condition)
            if a.key in graph.action_first
        ]
        if found:
            levels[condition] = min(found)
        else:
            unreachable.add(condition)
            logger.warning("Host action of %s is unreachable", condition)

    def sort_key(condition):
        reachable = condition not in unreachable
        return (not reachable, levels.get(condition, 0)) + condition.sort_key

    conditions = tuple(sorted(task.conditions, key=sort_key))
    return UnknownOrder(conditions, levels, frozenset(unreachable))


def dump_graph(graph):
    lines = []
    for level, facts in enumerate(graph.fact_levels):
        lines.append("fact-level {}".format(level))
        for fact in sorted(facts):
            lines.append("  {}".format(fact))
        pairs = sorted(
            tuple(sorted(str(x) for x in pair)) for pair in graph.fact_mutexes[level]
        )
        for x, y in pairs:
            lines.append("  mutex {} {}".format(x, y))
        if level < len(graph.action_levels):
            lines.append("action-level {}".format(level))
            for key in sorted(graph.action_levels[level]):
                lines.append("  {}".format(key))
    return "\n".join(lines) + "\n"
