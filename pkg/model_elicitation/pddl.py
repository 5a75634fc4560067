"""
Reader and printer for annotated PDDL.

The dialect is STRIPS with typing, extended with two per-action sections:
``:possible-precondition`` and ``:possible-effect``. A negated literal in
``:possible-effect`` is a possible delete effect.
"""
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from .exceptions import DomainError, PDDLSyntaxError

logger = logging.getLogger(__name__)

PRE = "pre"
ADD = "add"
DEL = "del"
SLOTS = (PRE, ADD, DEL)

ROOT_TYPE = "object"

UNSUPPORTED_REQUIREMENTS = {
    ":adl",
    ":conditional-effects",
    ":negative-preconditions",
    ":disjunctive-preconditions",
    ":existential-preconditions",
    ":universal-preconditions",
    ":quantified-preconditions",
    ":numeric-fluents",
    ":fluents",
    ":derived-predicates",
    ":durative-actions",
}


class Atom(NamedTuple):
    predicate: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return "({})".format(self.predicate)
        return "({} {})".format(self.predicate, " ".join(self.args))

    @property
    def is_ground(self):
        return not any(arg.startswith("?") for arg in self.args)

    def ground(self, binding):
        return Atom(self.predicate, tuple(binding.get(arg, arg) for arg in self.args))


class PossibleCondition(NamedTuple):
    schema: str
    slot: str
    atom: Atom

    def __str__(self):
        return "{}:{}:{}".format(self.schema, self.slot, self.atom)

    @property
    def sort_key(self):
        return (self.schema, str(self.atom), self.slot)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple = ()
    pre: frozenset = frozenset()
    add: frozenset = frozenset()
    delete: frozenset = frozenset()
    poss_pre: frozenset = frozenset()
    poss_add: frozenset = frozenset()
    poss_del: frozenset = frozenset()

    @property
    def parameter_names(self):
        return tuple(name for name, _type in self.parameters)

    def possible(self, slot):
        return {PRE: self.poss_pre, ADD: self.poss_add, DEL: self.poss_del}[slot]

    def certain(self, slot):
        return {PRE: self.pre, ADD: self.add, DEL: self.delete}[slot]

    @property
    def conditions(self):
        return tuple(
            sorted(
                (
                    PossibleCondition(self.name, slot, atom)
                    for slot in SLOTS
                    for atom in self.possible(slot)
                ),
                key=lambda c: c.sort_key,
            )
        )


@dataclass(frozen=True)
class AnnotatedDomain:
    name: str
    requirements: tuple = ()
    types: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    predicates: dict = field(default_factory=dict)
    schemas: tuple = ()

    @property
    def n(self):
        return sum(
            len(s.poss_pre) + len(s.poss_add) + len(s.poss_del) for s in self.schemas
        )

    @property
    def conditions(self):
        return tuple(c for schema in self.schemas for c in schema.conditions)

    def schema(self, name):
        for schema in self.schemas:
            if schema.name == name:
                return schema
        raise KeyError(name)

    def is_subtype(self, type_name, parent):
        seen = set()
        while type_name not in seen:
            if type_name == parent:
                return True
            seen.add(type_name)
            type_name = self.types.get(type_name, ROOT_TYPE)
        return parent == ROOT_TYPE

    def replace_schemas(self, schemas):
        return AnnotatedDomain(
            name=self.name,
            requirements=self.requirements,
            types=dict(self.types),
            constants=dict(self.constants),
            predicates=dict(self.predicates),
            schemas=tuple(schemas),
        )


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    domain_name: str
    objects: dict = field(default_factory=dict)
    init: frozenset = frozenset()
    goal: frozenset = frozenset()


class Token(NamedTuple):
    value: str
    line: int
    column: int


class _Node(list):
    def __init__(self, line, column):
        super().__init__()
        self.line = line
        self.column = column


def tokenize(text):
    tokens = []
    line, column = 1, 1
    i, length = 0, len(text)
    while i < length:
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch.isspace():
            column += 1
            i += 1
            continue
        if ch == ";":
            while i < length and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            tokens.append(Token(ch, line, column))
            column += 1
            i += 1
            continue
        start = i
        while i < length and not text[i].isspace() and text[i] not in "();":
            i += 1
        tokens.append(Token(text[start:i], line, column))
        column += i - start
    return tokens


def read_sexpr(text):
    tokens = tokenize(text)
    if not tokens:
        raise PDDLSyntaxError("empty input", 1, 1)
    stack = []
    root = None
    for token in tokens:
        if token.value == "(":
            node = _Node(token.line, token.column)
            if stack:
                stack[-1].append(node)
            elif root is not None:
                raise PDDLSyntaxError(
                    "unexpected expression after end of definition",
                    token.line,
                    token.column,
                )
            else:
                root = node
            stack.append(node)
        elif token.value == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", token.line, token.column)
            stack.pop()
        else:
            if not stack:
                raise PDDLSyntaxError(
                    "unexpected token '%s'" % token.value, token.line, token.column
                )
            stack[-1].append(token)
    if stack:
        raise PDDLSyntaxError("unbalanced '('", stack[-1].line, stack[-1].column)
    return root


def _position(node):
    if isinstance(node, Token):
        return node.line, node.column
    return node.line, node.column


def _symbol(node, what):
    if not isinstance(node, Token):
        raise PDDLSyntaxError("expected %s" % what, *_position(node))
    return node.value


def _keyword(node):
    if isinstance(node, Token):
        return node.value.lower()
    return None


def _expect_list(node, what):
    if not isinstance(node, _Node):
        raise PDDLSyntaxError("expected %s" % what, *_position(node))
    return node


def _domain_error(message, node):
    line, column = _position(node)
    return DomainError("{} (line {}, column {})".format(message, line, column))


def parse_typed_list(node):
    """
    Returns ``[(name, type), ...]`` for ``a b - t c`` style lists.
    """
    result = []
    pending = []
    items = list(node)
    i = 0
    while i < len(items):
        value = _symbol(items[i], "name")
        if value == "-":
            if i + 1 >= len(items) or not pending:
                raise PDDLSyntaxError("dangling type marker", *_position(items[i]))
            type_name = _symbol(items[i + 1], "type name")
            result.extend((name, type_name) for name in pending)
            pending = []
            i += 2
            continue
        pending.append(value)
        i += 1
    result.extend((name, ROOT_TYPE) for name in pending)
    return result


def _parse_literals(node):
    """
    Flatten a conjunction into ``(positive, negative)`` lists of
    ``(atom_node, predicate, args)``.
    """
    positive, negative = [], []
    node = _expect_list(node, "formula")
    if not node:
        return positive, negative
    head = _keyword(node[0])
    if head == "and":
        for child in node[1:]:
            pos, neg = _parse_literals(child)
            positive.extend(pos)
            negative.extend(neg)
        return positive, negative
    if head == "not":
        if len(node) != 2:
            raise PDDLSyntaxError("'not' takes one literal", node.line, node.column)
        inner = _expect_list(node[1], "literal")
        if not inner or _keyword(inner[0]) in ("and", "not"):
            raise PDDLSyntaxError("'not' takes one atom", inner.line, inner.column)
        negative.append(_literal(inner))
        return positive, negative
    if head in ("or", "imply", "forall", "exists", "when", "increase", "="):
        raise _domain_error("unsupported construct '%s'" % head, node)
    positive.append(_literal(node))
    return positive, negative


def _literal(node):
    predicate = _symbol(node[0], "predicate name")
    args = tuple(_symbol(arg, "term") for arg in node[1:])
    return node, predicate, args


class _DomainReader:
    def __init__(self, root):
        self.root = root
        self.name = ""
        self.requirements = []
        self.types = {}
        self.constants = {}
        self.predicates = {}
        self.schemas = []

    def read(self):
        root = _expect_list(self.root, "(define ...)")
        if len(root) < 2 or _keyword(root[0]) != "define":
            raise PDDLSyntaxError("expected (define ...)", root.line, root.column)
        header = _expect_list(root[1], "(domain NAME)")
        if len(header) != 2 or _keyword(header[0]) != "domain":
            raise PDDLSyntaxError("expected (domain NAME)", header.line, header.column)
        self.name = _symbol(header[1], "domain name")
        for section in root[2:]:
            section = _expect_list(section, "domain section")
            if not section:
                raise PDDLSyntaxError("empty section", section.line, section.column)
            key = _keyword(section[0])
            if key == ":requirements":
                self.read_requirements(section)
            elif key == ":types":
                for name, parent in parse_typed_list(section[1:]):
                    self.types[name] = parent
            elif key == ":constants":
                self.constants.update(parse_typed_list(section[1:]))
            elif key == ":predicates":
                self.read_predicates(section)
            elif key == ":action":
                self.schemas.append(self.read_action(section))
            else:
                raise PDDLSyntaxError(
                    "unknown domain section '%s'" % key, section.line, section.column
                )
        names = [schema.name for schema in self.schemas]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise DomainError("duplicate action names: %s" % ", ".join(duplicates))
        return AnnotatedDomain(
            name=self.name,
            requirements=tuple(self.requirements),
            types=dict(self.types),
            constants=dict(self.constants),
            predicates=dict(self.predicates),
            schemas=tuple(self.schemas),
        )

    def read_requirements(self, section):
        for node in section[1:]:
            requirement = _symbol(node, "requirement").lower()
            if requirement in UNSUPPORTED_REQUIREMENTS:
                raise _domain_error("unsupported requirement %s" % requirement, node)
            self.requirements.append(requirement)

    def check_type(self, type_name, node):
        if type_name != ROOT_TYPE and type_name not in self.types:
            raise _domain_error("undeclared type '%s'" % type_name, node)

    def read_predicates(self, section):
        for node in section[1:]:
            node = _expect_list(node, "predicate declaration")
            name = _symbol(node[0], "predicate name")
            params = parse_typed_list(node[1:])
            for _param, type_name in params:
                self.check_type(type_name, node)
            self.predicates[name] = tuple(type_name for _param, type_name in params)

    def read_action(self, section):
        name = _symbol(section[1], "action name")
        parts = {}
        items = section[2:]
        if len(items) % 2:
            raise PDDLSyntaxError(
                "action %s has an odd number of items" % name,
                section.line,
                section.column,
            )
        for key_node, value in zip(items[::2], items[1::2]):
            key = _keyword(key_node)
            if key == ":parameter":
                key = ":parameters"
            if key not in (
                ":parameters",
                ":precondition",
                ":possible-precondition",
                ":effect",
                ":possible-effect",
            ):
                raise PDDLSyntaxError(
                    "unknown action section '%s'" % key, *_position(key_node)
                )
            parts[key] = _expect_list(value, key)

        parameters = ()
        if ":parameters" in parts:
            parameters = tuple(parse_typed_list(parts[":parameters"]))
            for _param, type_name in parameters:
                self.check_type(type_name, parts[":parameters"])
        param_names = {param for param, _type in parameters}

        def atoms(key, allow_negative):
            if key not in parts:
                return frozenset(), frozenset()
            positive, negative = _parse_literals(parts[key])
            if negative and not allow_negative:
                raise _domain_error(
                    "negative literal in %s of %s is not supported" % (key, name),
                    negative[0][0],
                )
            return (
                frozenset(self.make_atom(lit, param_names) for lit in positive),
                frozenset(self.make_atom(lit, param_names) for lit in negative),
            )

        pre, _ = atoms(":precondition", False)
        poss_pre, _ = atoms(":possible-precondition", False)
        add, delete = atoms(":effect", True)
        poss_add, poss_del = atoms(":possible-effect", True)

        schema = ActionSchema(
            name=name,
            parameters=parameters,
            pre=pre,
            add=add,
            delete=delete,
            poss_pre=poss_pre,
            poss_add=poss_add,
            poss_del=poss_del,
        )
        check_schema(schema)
        return schema

    def make_atom(self, literal, param_names):
        node, predicate, args = literal
        if predicate not in self.predicates:
            raise _domain_error("undeclared predicate '%s'" % predicate, node)
        arity = len(self.predicates[predicate])
        if len(args) != arity:
            raise _domain_error(
                "predicate '%s' takes %d argument(s), got %d"
                % (predicate, arity, len(args)),
                node,
            )
        for arg in args:
            if arg.startswith("?"):
                if arg not in param_names:
                    raise _domain_error("undeclared parameter '%s'" % arg, node)
            elif arg not in self.constants:
                raise _domain_error("undeclared constant '%s'" % arg, node)
        return Atom(predicate, args)


def check_schema(schema):
    def overlap(first, second, message):
        common = first & second
        if common:
            raise DomainError(
                "{} {} of action {}".format(
                    " ".join(str(a) for a in sorted(common)), message, schema.name
                )
            )

    overlap(schema.pre, schema.poss_pre, "is both certain and possible precondition")
    overlap(schema.add, schema.poss_add, "is both certain and possible add effect")
    overlap(
        schema.delete, schema.poss_del, "is both certain and possible delete effect"
    )
    overlap(schema.add, schema.delete, "is both added and deleted")
    overlap(schema.poss_add, schema.poss_del, "is both possible add and delete effect")
    # deleting an atom the action certainly adds has no observable effect
    overlap(schema.add, schema.poss_del, "is certainly added, possible delete")


def parse_domain(text):
    domain = _DomainReader(read_sexpr(text)).read()
    logger.debug(
        "Parsed domain %s with %d actions and %d possible conditions",
        domain.name,
        len(domain.schemas),
        domain.n,
    )
    return domain


def parse_problem(text, domain):
    root = _expect_list(read_sexpr(text), "(define ...)")
    if len(root) < 2 or _keyword(root[0]) != "define":
        raise PDDLSyntaxError("expected (define ...)", root.line, root.column)
    header = _expect_list(root[1], "(problem NAME)")
    if len(header) != 2 or _keyword(header[0]) != "problem":
        raise PDDLSyntaxError("expected (problem NAME)", header.line, header.column)
    name = _symbol(header[1], "problem name")
    domain_name = domain.name
    objects = dict(domain.constants)
    init_nodes, goal_node = [], None
    for section in root[2:]:
        section = _expect_list(section, "problem section")
        if not section:
            raise PDDLSyntaxError("empty section", section.line, section.column)
        key = _keyword(section[0])
        if key == ":domain":
            domain_name = _symbol(section[1], "domain name")
        elif key == ":requirements":
            continue
        elif key == ":objects":
            for obj, type_name in parse_typed_list(section[1:]):
                if type_name != ROOT_TYPE and type_name not in domain.types:
                    raise _domain_error("undeclared type '%s'" % type_name, section)
                objects[obj] = type_name
        elif key == ":init":
            init_nodes = list(section[1:])
        elif key == ":goal":
            goal_node = section[1] if len(section) > 1 else _Node(0, 0)
        else:
            raise PDDLSyntaxError(
                "unknown problem section '%s'" % key, section.line, section.column
            )
    if domain_name.lower() != domain.name.lower():
        logger.warning(
            "Problem %s names domain %s, parsing against %s",
            name,
            domain_name,
            domain.name,
        )

    def ground_atom(literal):
        node, predicate, args = literal
        if predicate not in domain.predicates:
            raise _domain_error("undeclared predicate '%s'" % predicate, node)
        if len(args) != len(domain.predicates[predicate]):
            raise _domain_error("arity mismatch for '%s'" % predicate, node)
        for arg in args:
            if arg.startswith("?"):
                raise _domain_error("non-ground atom %s" % predicate, node)
            if arg not in objects:
                raise _domain_error("unknown object '%s'" % arg, node)
        return Atom(predicate, args)

    init = set()
    for node in init_nodes:
        node = _expect_list(node, "init atom")
        if node and _keyword(node[0]) == "not":
            raise _domain_error("negative literal in :init", node)
        init.add(ground_atom(_literal(node)))

    goal = set()
    if goal_node is not None:
        positive, negative = _parse_literals(goal_node)
        if negative:
            raise _domain_error("negative goals are not supported", negative[0][0])
        goal = {ground_atom(lit) for lit in positive}

    return ProblemInstance(
        name=name,
        domain_name=domain.name,
        objects=objects,
        init=frozenset(init),
        goal=frozenset(goal),
    )


def _format_typed(pairs):
    return " ".join(
        name if type_name == ROOT_TYPE else "{} - {}".format(name, type_name)
        for name, type_name in pairs
    )


def format_conjunction(positive, negative=()):
    literals = [str(a) for a in sorted(positive)]
    literals.extend("(not {})".format(a) for a in sorted(negative))
    if not literals:
        return "()"
    if len(literals) == 1:
        return literals[0]
    return "(and {})".format(" ".join(literals))


def format_domain(domain):
    lines = ["(define (domain {})".format(domain.name)]
    if domain.requirements:
        lines.append("  (:requirements {})".format(" ".join(domain.requirements)))
    if domain.types:
        lines.append("  (:types {})".format(_format_typed(domain.types.items())))
    if domain.constants:
        constants = _format_typed(domain.constants.items())
        lines.append("  (:constants {})".format(constants))
    lines.append("  (:predicates")
    for predicate, arg_types in domain.predicates.items():
        params = [("?x%d" % i, t) for i, t in enumerate(arg_types)]
        if params:
            lines.append("    ({} {})".format(predicate, _format_typed(params)))
        else:
            lines.append("    ({})".format(predicate))
    lines.append("  )")
    for schema in domain.schemas:
        lines.append("  (:action {}".format(schema.name))
        lines.append("    :parameters ({})".format(_format_typed(schema.parameters)))
        lines.append("    :precondition {}".format(format_conjunction(schema.pre)))
        lines.append(
            "    :possible-precondition {}".format(format_conjunction(schema.poss_pre))
        )
        lines.append(
            "    :effect {}".format(format_conjunction(schema.add, schema.delete))
        )
        lines.append(
            "    :possible-effect {}".format(
                format_conjunction(schema.poss_add, schema.poss_del)
            )
        )
        lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"


def format_problem(problem):
    lines = [
        "(define (problem {})".format(problem.name),
        "  (:domain {})".format(problem.domain_name),
        "  (:objects {})".format(_format_typed(sorted(problem.objects.items()))),
        "  (:init",
    ]
    lines.extend("    {}".format(atom) for atom in sorted(problem.init))
    lines.append("  )")
    lines.append("  (:goal {})".format(format_conjunction(problem.goal)))
    lines.append(")")
    return "\n".join(lines) + "\n"
