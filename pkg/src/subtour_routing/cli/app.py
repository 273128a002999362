"""Command handlers of the subtour-routing command line."""
import logging
import sys
import uuid
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

from pydantic import TypeAdapter, ValidationError

from subtour_routing.config import config
from subtour_routing.exceptions import InfeasibleInstanceError
from subtour_routing.models.schema import GeneratorParams, OracleResult
from subtour_routing.services.approx_service import SolverService
from subtour_routing.services.bench_service import BenchService, load_corpus, random_corpus
from subtour_routing.services.evaluation import (normalize_root, schedule_cost,
                                                 schedule_delay, validate_schedule)
from subtour_routing.services.generators import gen_figure1, generate
from subtour_routing.services.oracle_service import (brute_force_delay_lower_bound,
                                                     brute_force_min_cost,
                                                     brute_force_min_delay)
from subtour_routing.storage.codec import (dumps_canonical, dumps_model, load_instance,
                                           load_schedule, records_to_csv, save_instance,
                                           save_schedule, schedule_to_dot, write_text)
from subtour_routing.storage.run_repository import RunRepository
from subtour_routing.utils import leq_tol

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_GUARANTEE = 4

class SubtourRoutingCli:
    """Runs one subcommand and turns its outcome into an exit status.

    Reports go to the output stream; logs and error messages go to stderr.
    """

    def __init__(self, out: Optional[TextIO] = None, err: Optional[TextIO] = None):
        """Initialize the command handlers."""
        self.out = out or sys.stdout
        self.err = err or sys.stderr
        self.solver = SolverService()

    def emit(self, text: str) -> None:
        """Write a report to the output stream."""
        self.out.write(text)

    def format_error_response(self, error: Exception) -> int:
        """Report an error consistently and return its exit status."""
        # Generate a unique error ID for traceability in logs
        error_id = str(uuid.uuid4())[:8]

        if isinstance(error, InfeasibleInstanceError):
            logger.error(f"Infeasible instance [{error_id}]: {error}")
            self.emit(dumps_canonical({
                "feasible": False,
                "min_delay": error.min_delay,
                "deadline": error.deadline,
            }))
            status = EXIT_INFEASIBLE
        elif isinstance(error, ValidationError):
            logger.error(f"Invalid input [{error_id}]: {error.error_count()} validation errors")
            status = EXIT_INPUT
        elif isinstance(error, ValueError):
            logger.error(f"Validation error [{error_id}]: {error}")
            status = EXIT_INPUT
        elif isinstance(error, (IOError, OSError)):
            logger.error(f"File system error [{error_id}]: {error}", exc_info=True)
            status = EXIT_INPUT
        else:
            logger.error(f"Unexpected error [{error_id}]: {error}", exc_info=True)
            status = EXIT_UNEXPECTED
        self.err.write(f"Error: {error}\n")
        return status

    def run(self, args: Any) -> int:
        """Dispatch parsed arguments to their handler."""
        handler = getattr(self, f"cmd_{args.command}")
        try:
            return handler(args)
        except Exception as e:
            return self.format_error_response(e)

    def cmd_check(self, args: Any) -> int:
        """Decide feasibility: exit 0 if the deadline can be met, 3 otherwise."""
        instance = load_instance(Path(args.instance))
        best, feasible = self.solver.check(instance)
        self.emit(dumps_canonical({
            "min_delay": best,
            "deadline": instance.deadline,
            "feasible": feasible,
        }))
        return EXIT_OK if feasible else EXIT_INFEASIBLE

    def cmd_solve(self, args: Any) -> int:
        """Run the approximation pipeline; exit 0 iff every guarantee holds."""
        instance = load_instance(Path(args.instance))
        if args.slack is not None:
            report = self.solver.solve_with_slack(instance, args.slack)
        else:
            report = self.solver.solve(instance, args.epsilon)
        if args.out:
            save_schedule(report.schedule, Path(args.out))
        if args.dot:
            write_text(Path(args.dot), schedule_to_dot(instance, report.schedule))
        self.emit(dumps_model(report))
        return EXIT_OK if report.guarantees_ok else EXIT_GUARANTEE

    def cmd_eval(self, args: Any) -> int:
        """Evaluate a schedule file: exit 2 if invalid, 3 if it misses the deadline."""
        instance = load_instance(Path(args.instance))
        schedule = load_schedule(Path(args.schedule))
        if schedule.has_vertex(schedule.root):
            # A root with two children gets a co-located aux vertex below it
            schedule = normalize_root(schedule)
        report = validate_schedule(instance, schedule)
        if not report.ok:
            self.emit(dumps_model(report))
            return EXIT_INPUT

        delay = schedule_delay(instance, schedule)
        cost = schedule_cost(instance, schedule)
        limit = instance.deadline * args.deadline_factor
        meets = leq_tol(delay, limit, config.tolerance)
        self.emit(dumps_canonical({
            "valid": True,
            "delay": delay,
            "deadline": instance.deadline,
            "meets_deadline": meets,
            "cost": cost.model_dump(mode="json"),
        }))
        return EXIT_OK if meets else EXIT_INFEASIBLE

    def cmd_bounds(self, args: Any) -> int:
        """Print the lower bounds and deadline conditions of an instance."""
        instance = load_instance(Path(args.instance))
        bounds, conditions = self.solver.bounds(instance)
        self.emit(dumps_canonical({
            "bounds": bounds.model_dump(mode="json"),
            "deadline_conditions": conditions.model_dump(mode="json"),
        }))
        return EXIT_OK

    def cmd_oracle(self, args: Any) -> int:
        """Run an exhaustive reference search."""
        instance = load_instance(Path(args.instance))
        if args.objective == "subset":
            value = brute_force_delay_lower_bound(instance)
            self.emit(dumps_canonical({"best_value": value}))
            return EXIT_OK
        search = brute_force_min_delay if args.objective == "delay" else brute_force_min_cost
        result: OracleResult = search(instance)
        self.emit(dumps_model(result))
        return EXIT_OK

    def cmd_gen(self, args: Any) -> int:
        """Generate an instance; the figure1 family can also write its drawn schedule."""
        fields = ("k", "n", "epsilon", "seed", "box", "delta", "sigma", "slack",
                  "deadline", "extra_points")
        spec: Dict[str, Any] = {"family": args.family}
        spec.update({f: getattr(args, f) for f in fields if getattr(args, f, None) is not None})
        params = TypeAdapter(GeneratorParams).validate_python(spec)
        instance = generate(params)

        if args.schedule_out:
            if args.family != "figure1":
                raise ValueError("--schedule-out is only available for the figure1 family")
            _, schedule = gen_figure1(params.sigma, params.deadline)
            save_schedule(schedule, Path(args.schedule_out))
        if args.out:
            save_instance(instance, Path(args.out))
        else:
            self.emit(dumps_model(instance))
        return EXIT_OK

    def cmd_bench(self, args: Any) -> int:
        """Run the benchmark harness; exit 4 if any solved run breaks a guarantee."""
        if args.random is not None:
            corpus = random_corpus(args.random, args.seed, max_items=args.max_items)
        elif args.corpus:
            corpus = load_corpus(Path(args.corpus))
        else:
            raise ValueError("Give a corpus directory or --random N")

        # --db has already been copied into config.results_db_path
        repository = RunRepository(db_url=config.get_db_url()) if args.db else None
        service = BenchService(workers=args.workers, repository=repository)
        result = service.run(corpus, args.epsilons)

        table = records_to_csv(result.records)
        if args.csv:
            write_text(Path(args.csv), table)
        if args.json:
            write_text(Path(args.json), dumps_model(result))
        if not args.csv and not args.json:
            self.emit(table)
        self.emit(dumps_model(result.summary))

        violated = any(r.error is None and not r.guarantees_ok for r in result.records)
        return EXIT_GUARANTEE if violated else EXIT_OK
