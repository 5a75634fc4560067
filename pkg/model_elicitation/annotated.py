"""
Grounding of annotated domains and construction of the concrete models.

A selection maps every ``PossibleCondition`` of a task to ``True`` (present)
or ``False`` (absent). Every concrete model, including the most constrained
and most relaxed ones, is the result of ``concretize`` on some selection.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from .exceptions import PartialSelection, UnknownCondition, UnknownElement
from .pddl import ADD, DEL, PRE, SLOTS, Atom

logger = logging.getLogger(__name__)

PRESENT = True
ABSENT = False


def presence_label(value):
    return "present" if value else "absent"


def relaxing_value(condition):
    """
    The value of ``condition`` that makes a model more permissive.
    """
    return condition.slot == ADD


def constraining_value(condition):
    return condition.slot != ADD


class ActionKey(NamedTuple):
    name: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return "({})".format(self.name)
        return "({} {})".format(self.name, " ".join(self.args))


class GroundCondition(NamedTuple):
    condition: object
    atom: Atom


@dataclass(frozen=True)
class GroundAction:
    key: ActionKey
    pre: frozenset
    add: frozenset
    delete: frozenset
    possible: tuple = ()

    def __str__(self):
        return str(self.key)

    @property
    def conditions(self):
        return tuple(gc.condition for gc in self.possible)

    def possible_atoms(self, slot):
        return frozenset(gc.atom for gc in self.possible if gc.condition.slot == slot)

    def atom_for(self, condition):
        for gc in self.possible:
            if gc.condition == condition:
                return gc.atom
        raise UnknownCondition(str(condition))


@dataclass(frozen=True)
class Action:
    key: ActionKey
    pre: frozenset
    add: frozenset
    delete: frozenset

    def __str__(self):
        return str(self.key)


@dataclass(frozen=True, eq=False)
class GroundTask:
    domain: object
    problem: object
    actions: tuple
    atoms: frozenset
    conditions: tuple

    def __post_init__(self):
        object.__setattr__(self, "_index", {a.key: a for a in self.actions})

    @property
    def n(self):
        return len(self.conditions)

    def action(self, key):
        try:
            return self._index[key]
        except KeyError:
            raise UnknownElement(str(key)) from None

    def has_action(self, key):
        return key in self._index

    def instances(self, condition):
        """Ground actions carrying ``condition``, sorted by key."""
        return tuple(a for a in self.actions if condition in a.conditions)

    def check_condition(self, condition):
        if condition not in self.conditions:
            raise UnknownCondition(str(condition))


@dataclass(frozen=True, eq=False)
class ConcreteModel:
    task: GroundTask
    actions: tuple
    selection: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_index", {a.key: a for a in self.actions})

    def __eq__(self, other):
        if not isinstance(other, ConcreteModel):
            return NotImplemented
        return self.actions == other.actions

    def __hash__(self):
        return hash(self.actions)

    def __str__(self):
        return self.label or selection_label(self.task, self.selection)

    def action(self, key):
        try:
            return self._index[key]
        except KeyError:
            raise UnknownElement(str(key)) from None

    def has_action(self, key):
        return key in self._index

    def without(self, keys):
        keys = frozenset(keys)
        return ConcreteModel(
            task=self.task,
            actions=tuple(a for a in self.actions if a.key not in keys),
            selection=self.selection,
            label="{}-{}".format(self.label or "model", len(keys)),
        )

    @property
    def selection_key(self):
        return tuple(self.selection[c] for c in self.task.conditions)


def selection_label(task, selection):
    present = [str(c) for c in task.conditions if selection.get(c)]
    return "{" + ", ".join(present) + "}"


def _candidates(domain, objects, type_name):
    return sorted(o for o, t in objects.items() if domain.is_subtype(t, type_name))


def ground(domain, problem):
    objects = dict(domain.constants)
    objects.update(problem.objects)
    actions = []
    for schema in domain.schemas:
        choices = [_candidates(domain, objects, t) for _name, t in schema.parameters]
        names = schema.parameter_names
        conditions = schema.conditions
        for combination in itertools.product(*choices):
            binding = dict(zip(names, combination))
            possible = tuple(
                GroundCondition(c, c.atom.ground(binding)) for c in conditions
            )
            actions.append(
                GroundAction(
                    key=ActionKey(schema.name, tuple(combination)),
                    pre=frozenset(a.ground(binding) for a in schema.pre),
                    add=frozenset(a.ground(binding) for a in schema.add),
                    delete=frozenset(a.ground(binding) for a in schema.delete),
                    possible=possible,
                )
            )
    actions.sort(key=lambda a: a.key)
    atoms = set(problem.init) | set(problem.goal)
    for action in actions:
        atoms.update(action.pre, action.add, action.delete)
        atoms.update(gc.atom for gc in action.possible)
    task = GroundTask(
        domain=domain,
        problem=problem,
        actions=tuple(actions),
        atoms=frozenset(atoms),
        conditions=domain.conditions,
    )
    logger.debug(
        "Grounded %s/%s into %d actions over %d atoms",
        domain.name,
        problem.name,
        len(actions),
        len(atoms),
    )
    return task


def concretize(task, selection, label=""):
    missing = [c for c in task.conditions if c not in selection]
    if missing:
        raise PartialSelection(missing)
    known = set(task.conditions)
    for condition in selection:
        if condition not in known:
            raise UnknownCondition(str(condition))
    actions = []
    for action in task.actions:
        chosen = {PRE: set(), ADD: set(), DEL: set()}
        for gc in action.possible:
            if selection[gc.condition]:
                chosen[gc.condition.slot].add(gc.atom)
        actions.append(
            Action(
                key=action.key,
                pre=action.pre | chosen[PRE],
                add=action.add | chosen[ADD],
                delete=action.delete | chosen[DEL],
            )
        )
    return ConcreteModel(
        task=task,
        actions=tuple(actions),
        selection={c: bool(selection[c]) for c in task.conditions},
        label=label,
    )


def constrained_selection(task):
    return {c: constraining_value(c) for c in task.conditions}


def relaxed_selection(task):
    return {c: relaxing_value(c) for c in task.conditions}


def most_constrained(task):
    return concretize(task, constrained_selection(task), label="con")


def most_relaxed(task):
    return concretize(task, relaxed_selection(task), label="rel")


def join_model(task):
    return concretize(task, {c: PRESENT for c in task.conditions}, label="join")


def constrained_minus(task, p):
    """
    The most constrained model with ``p`` flipped to its relaxing value.
    """
    task.check_condition(p)
    selection = constrained_selection(task)
    selection[p] = relaxing_value(p)
    return concretize(task, selection, label="con-{}".format(p))


def relaxed_plus(task, p):
    """
    The most relaxed model with ``p`` in its constraining role.

    Every model where ``p`` takes its constraining value is at most as
    relaxed as this one.
    """
    task.check_condition(p)
    selection = relaxed_selection(task)
    selection[p] = constraining_value(p)
    return concretize(task, selection, label="rel+{}".format(p))


def enumerate_selections(task):
    conditions = task.conditions
    for values in itertools.product((ABSENT, PRESENT), repeat=len(conditions)):
        yield dict(zip(conditions, values))


def enumerate_models(task):
    for selection in enumerate_selections(task):
        yield concretize(task, selection)


def parse_selection(text, task):
    """
    Read ``present|absent <schema> <slot> (<atom>)`` lines.
    """
    by_name = {(c.schema, c.slot, str(c.atom)): c for c in task.conditions}
    selection = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 3)
        if len(parts) != 4 or parts[0] not in ("present", "absent"):
            raise UnknownCondition("line %d: %r" % (number, raw))
        value, schema, slot, atom = parts
        if slot not in SLOTS:
            raise UnknownCondition("line %d: unknown slot %r" % (number, slot))
        atom = " ".join(atom.split()).replace("( ", "(").replace(" )", ")")
        try:
            condition = by_name[(schema, slot, atom)]
        except KeyError:
            raise UnknownCondition("line %d: %s %s %s" % (number, schema, slot, atom))
        selection[condition] = value == "present"
    return selection


def format_selection(task, selection):
    return "".join(
        "{} {} {} {}\n".format(
            presence_label(selection[c]), c.schema, c.slot, c.atom
        )
        for c in task.conditions
        if c in selection
    )
