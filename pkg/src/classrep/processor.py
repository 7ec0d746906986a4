"""High-level orchestration: solve states and build distributions for a run."""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any, Callable, Iterator

from .config import INFINITE, Exponent, GridConfig, Potential, RunConfig, SolverConfig
from .eigensolver import EigenSolution, analytic_box, solve
from .ensemble import EnergyDistribution, build_distribution
from .errors import ClassrepError, IntegrabilityError
from .exporter import TaskFailure

logger = logging.getLogger(__name__)


def _sort_key(m: Exponent) -> float:
    return float("inf") if m == INFINITE else float(m)


def solve_states_for_m(m: Exponent, n_max: int, solver: SolverConfig) -> list[EigenSolution]:
    """All states n = 0..n_max for one exponent; the box limit uses the analytic states."""
    if m == INFINITE:
        return [analytic_box(n) for n in range(n_max + 1)]
    return solve(Potential(m=m), n_max, solver)


def distribution_for_state(sol: EigenSolution, grid: GridConfig) -> EnergyDistribution:
    return build_distribution(sol, grid)


class ClassrepProcessor:
    """Runs the per-(m, n) work of a RunConfig and collects failures.

    Tasks are independent, so with ``workers > 1`` they go to a process pool.
    Results are yielded in (m, n) order whatever order the workers finish in;
    a failing task is logged, recorded in ``failures`` and skipped.
    """

    def __init__(self, config: RunConfig):
        """Initialize the processor.

        Args:
            config: Run configuration (states, grids, worker count)
        """
        self.config = config
        self.failures: list[TaskFailure] = []
        self._states: dict[tuple[Exponent, int], EigenSolution] | None = None

    def _run(self, func: Callable, tasks: list[tuple[Any, tuple]]) -> dict[Any, Any]:
        """Evaluate func(*args) for every (key, args) task; exceptions are returned, not raised."""
        results: dict[Any, Any] = {}
        if self.config.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                futures = {pool.submit(func, *args): key for key, args in tasks}
                for future in as_completed(futures):
                    key = futures[future]
                    try:
                        results[key] = future.result()
                    except Exception as e:
                        results[key] = e
        else:
            for key, args in tasks:
                try:
                    results[key] = func(*args)
                except Exception as e:
                    results[key] = e
        return results

    def _record_failure(self, m: Exponent, n: int | None, stage: str, error: Exception, expected: bool = False):
        failure = TaskFailure(
            m=m, n=n, stage=stage, error_type=type(error).__name__, message=str(error), expected=expected
        )
        self.failures.append(failure)
        if expected:
            logger.info(f"{stage} for m={m}, n={n} not available (expected): {error}")
        else:
            logger.error(f"{stage} failed for m={m}, n={n}: {error}")

    def solve_states(self) -> dict[tuple[Exponent, int], EigenSolution]:
        """Solve every requested state once; each m is one task up to max(n_list).

        Returns:
            Mapping (m, n) -> EigenSolution for the states that succeeded
        """
        if self._states is not None:
            return self._states
        n_max = max(self.config.n_list)
        tasks = [(m, (m, n_max, self.config.solver)) for m in self.config.m_list]
        logger.info(f"Solving {len(tasks)} exponent(s) for n <= {n_max} with {self.config.workers} worker(s)")

        states: dict[tuple[Exponent, int], EigenSolution] = {}
        for m, outcome in self._run(solve_states_for_m, tasks).items():
            if isinstance(outcome, Exception):
                if not isinstance(outcome, ClassrepError):
                    logger.error(f"Unexpected error solving m={m}", exc_info=outcome)
                self._record_failure(m, None, "eigen", outcome)
                continue
            for sol in outcome:
                if sol.n in self.config.n_list:
                    states[(m, sol.n)] = sol
        self._states = states
        return states

    def process_states(self) -> Iterator[tuple[Exponent, int, EigenSolution]]:
        """Yield (m, n, solution) in canonical (m, n) order."""
        states = self.solve_states()
        for m, n in sorted(states, key=lambda key: (_sort_key(key[0]), key[1])):
            yield m, n, states[(m, n)]

    def process_distributions(self) -> Iterator[tuple[Exponent, int, EigenSolution, EnergyDistribution]]:
        """Yield (m, n, solution, distribution) in canonical (m, n) order.

        The box limit has no integrable distribution; it is recorded as an
        expected failure instead of a task.

        Example:
            >>> processor = ClassrepProcessor(RunConfig(m_list=[1, 2], n_list=[0]))
            >>> for m, n, sol, f in processor.process_distributions():
            ...     print(m, n, f.integral)
        """
        states = self.solve_states()
        tasks = []
        for (m, n), sol in states.items():
            if m == INFINITE:
                self._record_failure(
                    m,
                    n,
                    "distribution",
                    IntegrabilityError("f ~ 1/eps is not integrable in the box limit", exponent=-1.0),
                    expected=True,
                )
                continue
            tasks.append(((m, n), (sol, self.config.grid)))
        logger.info(f"Building {len(tasks)} distribution(s)")
        results = self._run(distribution_for_state, tasks)

        for m, n in sorted(results, key=lambda key: (_sort_key(key[0]), key[1])):
            outcome = results[(m, n)]
            if isinstance(outcome, Exception):
                self._record_failure(m, n, "distribution", outcome)
                continue
            yield m, n, states[(m, n)], outcome

