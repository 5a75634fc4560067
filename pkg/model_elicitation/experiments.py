"""
Random domain mutation and the evaluation pipeline.
"""
import itertools
import logging
import random
import time
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path

from .annotated import ground, most_constrained
from .conf import get_setting
from .elicitation import run_session
from .exceptions import (
    DomainError,
    ElicitationError,
    InsufficientAtoms,
    QueryBudgetExceeded,
    RecoveryFailure,
)
from .oracle.simulated import SimulatedOracle
from .pddl import (
    ADD,
    DEL,
    PRE,
    SLOTS,
    Atom,
    PossibleCondition,
    parse_domain,
    parse_problem,
)
from .planning_graph import atoms_mutex, build_graph
from .query_gen import generate_all
from .signals import experiment_finished

logger = logging.getLogger(__name__)

DOMAINS_DIR = Path(__file__).resolve().parent / "domains"

BUNDLED_DOMAINS = ("blocksworld", "rover", "satellite", "zenotravel")

CSV_COLUMNS = (
    "domain",
    "possible_count",
    "avg_queries",
    "avg_val",
    "avg_plan",
    "avg_template",
    "avg_seconds",
)


@dataclass(frozen=True)
class ExperimentConfig:
    domain_path: str
    problem_path: str
    k: int
    seeds: tuple
    name: str = ""
    ordering: str = ""
    inject_ratio: float = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        object.__setattr__(self, "seeds", tuple(self.seeds))

    @property
    def label(self):
        return self.name or Path(self.domain_path).parent.name

    def to_dict(self):
        data = asdict(self)
        data["seeds"] = list(self.seeds)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class SeedResult:
    seed: int
    queries: int
    val: int
    plan: int
    template: int
    merged: int
    seconds: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class StatsRow:
    domain: str
    possible_count: int
    avg_queries: float
    avg_val: float
    avg_plan: float
    avg_template: float
    avg_seconds: float
    seeds: tuple = field(default=(), compare=False)
    merges: int = 0

    def to_dict(self):
        return {
            "domain": self.domain,
            "possible_count": self.possible_count,
            "avg_queries": round(self.avg_queries, 2),
            "avg_val": round(self.avg_val, 2),
            "avg_plan": round(self.avg_plan, 2),
            "avg_template": round(self.avg_template, 2),
            "avg_seconds": round(self.avg_seconds, 3),
        }


def bundled_config(name, k, seeds=range(10), problem="problem.pddl"):
    return ExperimentConfig(
        domain_path=str(DOMAINS_DIR / name / "domain.pddl"),
        problem_path=str(DOMAINS_DIR / name / problem),
        k=k,
        seeds=tuple(seeds),
        name=name,
    )


def _compatible_arguments(domain, schema, arg_types):
    options = []
    for arg_type in arg_types:
        options.append(
            [
                name
                for name, param_type in schema.parameters
                if domain.is_subtype(param_type, arg_type)
            ]
        )
    for args in itertools.product(*options):
        if len(set(args)) == len(args):
            yield tuple(args)


def _schema_atoms(schema):
    atoms = set()
    for slot in SLOTS:
        atoms |= schema.certain(slot) | schema.possible(slot)
    return atoms


def _injection_candidates(domain):
    candidates = []
    for schema in domain.schemas:
        used = _schema_atoms(schema)
        for predicate, arg_types in sorted(domain.predicates.items()):
            for args in _compatible_arguments(domain, schema, arg_types):
                atom = Atom(predicate, args)
                if atom in used:
                    continue
                for slot in SLOTS:
                    candidates.append((schema.name, slot, atom))
    return candidates


def _removal_candidates(domain):
    return [
        (schema.name, slot, atom)
        for schema in domain.schemas
        for slot in SLOTS
        for atom in sorted(schema.certain(slot))
    ]


class _PreconditionCheck:
    """
    An injected precondition must be reachable together with the certain
    preconditions of some reachable instance.
    """

    def __init__(self, domain, problem):
        self.task = ground(domain, problem)
        self.graph = build_graph(most_constrained(self.task), problem.init)
        self.domain = domain

    def accepts(self, schema_name, atom):
        schema = self.domain.schema(schema_name)
        names = schema.parameter_names
        for action in self.task.actions:
            if action.key.name != schema_name:
                continue
            if action.key not in self.graph.action_first:
                continue
            pa = atom.ground(dict(zip(names, action.key.args)))
            if not atoms_mutex(self.graph, action.pre | {pa}):
                return True
        return False


CERTAIN_FIELDS = {PRE: "pre", ADD: "add", DEL: "delete"}
SCHEMA_FIELDS = ("pre", "add", "delete", "poss_pre", "poss_add", "poss_del")


def _fields(schema):
    return {name: set(getattr(schema, name)) for name in SCHEMA_FIELDS}


def _rebuild(schema, fields):
    return type(schema)(
        name=schema.name,
        parameters=schema.parameters,
        **{name: frozenset(atoms) for name, atoms in fields.items()},
    )


def _injectable(schema, slot, atom):
    if slot == PRE:
        return atom not in schema.add
    if slot == ADD:
        # adding a required or deleted atom has no observable effect
        return atom not in schema.pre and atom not in schema.delete
    return atom not in schema.add


def mutate_domain(domain, problem, k, seed, inject_ratio=None):
    """
    Turn ``k`` atoms of a concrete domain into possible conditions.

    Returns the annotated domain and the hidden truth: atoms moved out of
    certain slots are present, injected atoms are absent.
    """
    if domain.n:
        raise DomainError("%s already has possible conditions" % domain.name)
    if k <= 0:
        return domain, {}
    if inject_ratio is None:
        inject_ratio = get_setting("ELICITATION_INJECT_RATIO")
    rng = random.Random(seed)
    injected_count = int(k * inject_ratio)
    removed_count = k - injected_count

    removable = _removal_candidates(domain)
    if len(removable) < removed_count:
        raise InsufficientAtoms(
            "%s has %d certain atoms, %d requested"
            % (domain.name, len(removable), removed_count)
        )
    schemas = {schema.name: schema for schema in domain.schemas}
    changes = {name: _fields(schema) for name, schema in schemas.items()}

    truth = {}
    for schema_name, slot, atom in rng.sample(removable, removed_count):
        fields = changes[schema_name]
        fields[CERTAIN_FIELDS[slot]].discard(atom)
        fields["poss_" + slot].add(atom)
        truth[PossibleCondition(schema_name, slot, atom)] = True

    if injected_count:
        check = _PreconditionCheck(domain, problem)
        candidates = _injection_candidates(domain)
        rng.shuffle(candidates)
        touched = set()
        for schema_name, slot, atom in candidates:
            if injected_count == 0:
                break
            if (schema_name, atom) in touched:
                continue
            schema = schemas[schema_name]
            if not _injectable(schema, slot, atom):
                continue
            if slot == PRE and not check.accepts(schema_name, atom):
                logger.debug("Rejected injection of %s into %s", atom, schema_name)
                continue
            changes[schema_name]["poss_" + slot].add(atom)
            touched.add((schema_name, atom))
            truth[PossibleCondition(schema_name, slot, atom)] = False
            injected_count -= 1
        if injected_count:
            raise InsufficientAtoms(
                "%s lacks %d injectable atoms" % (domain.name, injected_count)
            )

    mutated = domain.replace_schemas(
        _rebuild(schemas[schema.name], changes[schema.name])
        for schema in domain.schemas
    )
    logger.info(
        "Mutated %s with seed %s: %d possible conditions", domain.name, seed, mutated.n
    )
    return mutated, truth


def evaluate_seed(config, seed):
    with open(config.domain_path, encoding="utf-8") as f:
        domain = parse_domain(f.read())
    with open(config.problem_path, encoding="utf-8") as f:
        problem = parse_problem(f.read(), domain)
    annotated, truth = mutate_domain(
        domain, problem, config.k, seed, inject_ratio=config.inject_ratio
    )
    task = ground(annotated, problem)

    try:
        start = time.perf_counter()
        query_plan = generate_all(task, problem.init, ordering=config.ordering or None)
        seconds = time.perf_counter() - start
        session = run_session(
            task, problem.init, SimulatedOracle(task=task, truth=truth), query_plan
        )
    except ElicitationError as e:
        logger.exception("Seed %s of %s aborted", seed, config.label)
        raise RecoveryFailure(seed, truth, {}) from e
    if session.selection != truth:
        raise RecoveryFailure(seed, truth, session.selection)
    if len(query_plan) > task.n:
        raise QueryBudgetExceeded(
            seed, len(query_plan), task.n, truth, session.selection
        )

    return SeedResult(
        seed=seed,
        queries=len(query_plan),
        val=query_plan.count("val"),
        plan=query_plan.count("plan"),
        template=query_plan.count("template"),
        merged=sum(1 for q in query_plan if len(q.targets) > 1),
        seconds=seconds,
    )


def summarize(config, results):
    count = len(results)

    def mean(attribute):
        return sum(getattr(r, attribute) for r in results) / count

    return StatsRow(
        domain=config.label,
        possible_count=config.k,
        avg_queries=mean("queries"),
        avg_val=mean("val"),
        avg_plan=mean("plan"),
        avg_template=mean("template"),
        avg_seconds=mean("seconds"),
        seeds=tuple(r.seed for r in results),
        merges=sum(r.merged for r in results),
    )


def run_experiment(config, map_function=map):
    """
    Evaluate every seed of ``config`` and return its averaged rows.

    ``map_function`` decides how seeds are scheduled; results are sorted by
    seed before they are aggregated.
    """
    results = list(map_function(partial(evaluate_seed, config), config.seeds))
    results.sort(key=lambda r: r.seed)
    row = summarize(config, results)
    logger.info(
        "%s with %d possible conditions: %.2f queries on average",
        row.domain,
        row.possible_count,
        row.avg_queries,
    )
    experiment_finished.send(sender=ExperimentConfig, config=config, row=row)
    return [row]
