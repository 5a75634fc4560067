import json
import logging
import sys
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError, CommandParser

from ...annotated import (
    format_selection,
    ground,
    most_constrained,
    most_relaxed,
    parse_selection,
)
from ...elicitation import run_session
from ...exceptions import (
    ElicitationError,
    IncompleteElicitation,
    InconsistentOracle,
    RecoveryFailure,
)
from ...experiments import (
    CSV_COLUMNS,
    DOMAINS_DIR,
    ExperimentConfig,
    SeedResult,
    mutate_domain,
    run_experiment,
)
from ...oracle import oracle_factory
from ...pddl import format_domain, parse_domain, parse_problem
from ...planner import format_plan, plan_optimal
from ...query_gen import generate_all
from ...utils import rows_to_csv

VERBOSITY_LEVELS = {
    0: logging.ERROR,
    1: logging.WARNING,
    2: logging.INFO,
    3: logging.DEBUG,
}

USAGE_ERROR = 1
RECOVERY_ERROR = 2


class SubcommandParser(CommandParser):
    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(USAGE_ERROR, "%s: error: %s\n" % (self.prog, message))
        raise CommandError("Error: %s" % message, returncode=USAGE_ERROR)


def resolve_domain(name):
    """
    A path to a domain file, or the name of a bundled domain.
    """
    path = Path(name)
    if path.is_file():
        return path
    bundled = DOMAINS_DIR / name / "domain.pddl"
    if bundled.is_file():
        return bundled
    raise CommandError("No domain file %s" % name, returncode=USAGE_ERROR)


def resolve_problem(domain_path, problem):
    if problem:
        path = Path(problem)
        if not path.is_file():
            path = domain_path.parent / problem
    else:
        path = domain_path.parent / "problem.pddl"
    if not path.is_file():
        raise CommandError("No problem file %s" % path, returncode=USAGE_ERROR)
    return path


def read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CommandError(str(e), returncode=USAGE_ERROR)


class Command(BaseCommand):
    help = "Elicit a concrete model from an annotated PDDL domain"
    stealth_options = ("stdin",)

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(
            dest="subcommand", parser_class=SubcommandParser
        )

        check = subparsers.add_parser("check", help="Parse and report on a task")
        self.add_task_arguments(check)

        annotate = subparsers.add_parser(
            "annotate", help="Turn random atoms into possible conditions"
        )
        self.add_task_arguments(annotate)
        annotate.add_argument("-k", type=int, required=True)
        annotate.add_argument("--seed", type=int, default=0)
        annotate.add_argument("--truth", help="Write the hidden selection here")
        annotate.add_argument("--inject-ratio", type=float, default=None)
        self.add_output_argument(annotate)

        queries = subparsers.add_parser("queries", help="Print the query plan")
        self.add_task_arguments(queries)
        self.add_search_arguments(queries)
        queries.add_argument("--format", choices=("text", "json"), default="text")
        self.add_output_argument(queries)

        elicit = subparsers.add_parser("elicit", help="Run an elicitation session")
        self.add_task_arguments(elicit)
        self.add_search_arguments(elicit)
        elicit.add_argument(
            "--oracle",
            required=True,
            help="simulated:<truth file> or interactive",
        )
        elicit.add_argument("--log", help="Write the session as JSON lines here")
        self.add_output_argument(elicit)

        evaluate = subparsers.add_parser("eval", help="Run the evaluation")
        evaluate.add_argument(
            "domains", nargs="+", help="Domain files or bundled domain names"
        )
        evaluate.add_argument("--problem", default="")
        evaluate.add_argument("-k", type=int, action="append", dest="ks")
        evaluate.add_argument("--seed", type=int, default=0)
        evaluate.add_argument("--seeds", type=int, default=10)
        evaluate.add_argument("--ordering", choices=("con", "join"), default="")
        evaluate.add_argument("--inject-ratio", type=float, default=None)
        evaluate.add_argument(
            "--celery", action="store_true", help="Evaluate seeds as celery tasks"
        )
        self.add_output_argument(evaluate)

    def add_task_arguments(self, parser):
        parser.add_argument("domain", help="Domain file or bundled domain name")
        parser.add_argument("--problem", default="")

    def add_search_arguments(self, parser):
        parser.add_argument("--ordering", choices=("con", "join"), default="")
        parser.add_argument("--budget", type=int, default=None)

    def add_output_argument(self, parser):
        parser.add_argument("--output", "-o", default="")

    def handle(self, *args, **options):
        logging.getLogger("model_elicitation").setLevel(
            VERBOSITY_LEVELS.get(options["verbosity"], logging.DEBUG)
        )
        subcommand = options.get("subcommand")
        if not subcommand:
            raise CommandError(
                "Choose one of check, annotate, queries, elicit, eval",
                returncode=USAGE_ERROR,
            )
        handler = getattr(self, "handle_%s" % subcommand)
        try:
            handler(options)
        except (RecoveryFailure, InconsistentOracle, IncompleteElicitation) as e:
            raise CommandError(str(e), returncode=RECOVERY_ERROR)
        except ElicitationError as e:
            raise CommandError(str(e), returncode=USAGE_ERROR)

    def load(self, options):
        domain_path = resolve_domain(options["domain"])
        problem_path = resolve_problem(domain_path, options["problem"])
        domain = parse_domain(read_text(domain_path))
        problem = parse_problem(read_text(problem_path), domain)
        return domain, problem

    def emit(self, text, options):
        if options.get("output"):
            Path(options["output"]).write_text(text, encoding="utf-8")
        else:
            self.stdout.write(text, ending="")

    def handle_check(self, options):
        domain, problem = self.load(options)
        task = ground(domain, problem)
        lines = [
            "domain: {}".format(domain.name),
            "problem: {}".format(problem.name),
            "schemas: {}".format(len(domain.schemas)),
            "possible conditions: {}".format(domain.n),
            "ground actions: {}".format(len(task.actions)),
            "ground atoms: {}".format(len(task.atoms)),
        ]
        for condition in task.conditions:
            lines.append(
                "  {} ({} instances)".format(condition, len(task.instances(condition)))
            )
        for label, model in (
            ("most constrained", most_constrained(task)),
            ("most relaxed", most_relaxed(task)),
        ):
            plan = plan_optimal(model, problem.init, problem.goal)
            lines.append(
                "{}: {}".format(
                    label,
                    "unsolvable" if plan is None else "cost {}".format(plan.cost),
                )
            )
        self.stdout.write("\n".join(lines))

    def handle_annotate(self, options):
        domain, problem = self.load(options)
        annotated, truth = mutate_domain(
            domain,
            problem,
            options["k"],
            options["seed"],
            inject_ratio=options["inject_ratio"],
        )
        self.emit(format_domain(annotated), options)
        if options["truth"]:
            task = ground(annotated, problem)
            Path(options["truth"]).write_text(
                format_selection(task, truth), encoding="utf-8"
            )

    def handle_queries(self, options):
        domain, problem = self.load(options)
        task = ground(domain, problem)
        query_plan = generate_all(
            task,
            problem.init,
            ordering=options["ordering"] or None,
            budget=options["budget"],
        )
        if options["format"] == "json":
            text = "".join(
                json.dumps(query.to_dict(), sort_keys=True) + "\n"
                for query in query_plan
            )
        else:
            text = query_plan.to_text()
        self.emit(text, options)

    def make_oracle(self, choice, task, options):
        name, _, argument = choice.partition(":")
        if name == "simulated":
            if not argument:
                raise CommandError(
                    "The simulated oracle needs a truth file", returncode=USAGE_ERROR
                )
            truth = parse_selection(read_text(argument), task)
            return oracle_factory(
                name, task=task, truth=truth, budget=options["budget"]
            )
        if name == "interactive":
            return oracle_factory(
                name,
                task=task,
                read=self.make_reader(options.get("stdin") or sys.stdin),
                write=lambda text: self.stdout.write(text, ending=""),
            )
        try:
            return oracle_factory(name, task=task)
        except ValueError as e:
            raise CommandError(str(e), returncode=USAGE_ERROR)

    def make_reader(self, stream):
        def read(prompt):
            self.stdout.write(prompt, ending="")
            line = stream.readline()
            if not line:
                raise EOFError
            return line.rstrip("\n")

        return read

    def handle_elicit(self, options):
        domain, problem = self.load(options)
        task = ground(domain, problem)
        oracle = self.make_oracle(options["oracle"], task, options)
        query_plan = generate_all(
            task,
            problem.init,
            ordering=options["ordering"] or None,
            budget=options["budget"],
        )
        elicited = run_session(
            task,
            problem.init,
            oracle,
            query_plan=query_plan,
            oracle_name=options["oracle"].partition(":")[0],
        )
        transcript = elicited.transcript
        self.emit(transcript.to_text(), options)
        if options["log"]:
            Path(options["log"]).write_text(transcript.to_jsonl(), encoding="utf-8")
        plan = plan_optimal(elicited.model, problem.init, problem.goal)
        if plan is not None and options["verbosity"] > 1:
            self.stderr.write("plan in the elicited model:\n" + format_plan(plan))

    def celery_map(self, function, seeds):
        from ...tasks import evaluate_seed

        config = function.args[0]
        results = [evaluate_seed.delay(config.to_dict(), seed) for seed in seeds]
        return [SeedResult(**result.get()) for result in results]

    def handle_eval(self, options):
        if options["seeds"] < 1:
            raise CommandError("At least one seed is required", returncode=USAGE_ERROR)
        seeds = range(options["seed"], options["seed"] + options["seeds"])
        map_function = self.celery_map if options["celery"] else map
        rows = []
        for name in options["domains"]:
            domain_path = resolve_domain(name)
            problem_path = resolve_problem(domain_path, options["problem"])
            for k in options["ks"] or [4]:
                try:
                    config = ExperimentConfig(
                        domain_path=str(domain_path),
                        problem_path=str(problem_path),
                        k=k,
                        seeds=tuple(seeds),
                        name=domain_path.parent.name,
                        ordering=options["ordering"],
                        inject_ratio=options["inject_ratio"],
                    )
                except ValueError as e:
                    raise CommandError(str(e), returncode=USAGE_ERROR)
                rows.extend(run_experiment(config, map_function=map_function))
        self.emit(rows_to_csv((row.to_dict() for row in rows), CSV_COLUMNS), options)
