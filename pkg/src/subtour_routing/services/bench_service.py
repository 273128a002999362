"""Batch benchmark harness over a corpus of instances and epsilons."""
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import TypeAdapter

from subtour_routing.config import config
from subtour_routing.models.schema import (BenchResult, BenchSummary, GeneratorParams,
                                           Instance, RandomEuclideanParams, RunRecord)
from subtour_routing.services.approx_service import approx_schedule
from subtour_routing.services.generators import gen_random_euclidean, generate
from subtour_routing.storage.run_repository import RunRepository

logger = logging.getLogger(__name__)

# A string in place of an instance is the error that kept its file from loading
Corpus = List[Tuple[str, Union[Instance, str]]]

RANDOM_SLACKS = (1.0, 1.5, 3.0)

def run_instance(instance_id: str, instance: Union[Instance, str],
                 epsilon: float) -> RunRecord:
    """Solve one instance with one epsilon; failures become records with an error."""
    if isinstance(instance, str):
        return RunRecord(instance_id=instance_id, epsilon=epsilon, error=instance)
    start = time.perf_counter()
    try:
        report = approx_schedule(instance, epsilon)
    except ValueError as e:
        logger.error(f"Run {instance_id} (epsilon={epsilon}) failed: {e}")
        return RunRecord(
            instance_id=instance_id,
            epsilon=epsilon,
            n=instance.n,
            deadline=instance.deadline,
            wall_time=time.perf_counter() - start,
            error=str(e),
        )
    return RunRecord(
        instance_id=instance_id,
        epsilon=epsilon,
        n=instance.n,
        delay=report.delay,
        deadline=instance.deadline,
        travel=report.cost.travel,
        mst=report.bounds.mst,
        vehicles=report.cost.vehicle_count,
        cost=report.cost.total,
        cost_lb=report.bounds.cost_lb,
        delay_ratio=report.delay_ratio,
        length_ratio=report.length_ratio,
        cost_ratio=report.cost_ratio,
        guarantees_ok=report.guarantees_ok,
        wall_time=time.perf_counter() - start,
    )

def summarize(records: Sequence[RunRecord]) -> BenchSummary:
    """Aggregate counts and the largest observed ratios."""
    solved = [r for r in records if r.error is None]
    return BenchSummary(
        runs=len(records),
        failures=len(records) - len(solved),
        all_ok=all(r.guarantees_ok for r in solved) and len(solved) == len(records),
        max_delay_ratio=max((r.delay_ratio for r in solved), default=0.0),
        max_length_ratio=max((r.length_ratio for r in solved), default=0.0),
        max_cost_ratio=max((r.cost_ratio for r in solved), default=0.0),
        max_normalized_cost_ratio=max(
            (r.cost_ratio / (8 + 4 / r.epsilon) for r in solved), default=0.0
        ),
    )

def load_corpus(directory: Path) -> Corpus:
    """Instances from every *.json file; files with a "family" key are generator specs."""
    adapter = TypeAdapter(GeneratorParams)
    corpus = []
    failed = 0
    for path in sorted(Path(directory).glob("*.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            if isinstance(data, dict) and "family" in data:
                instance = generate(adapter.validate_python(data))
            else:
                instance = Instance.model_validate(data)
        except (ValueError, OSError) as e:
            logger.error(f"Cannot load corpus file {path}: {e}")
            corpus.append((path.stem, f"{type(e).__name__}: {e}"))
            failed += 1
            continue
        corpus.append((path.stem, instance))
    logger.info(f"Loaded {len(corpus) - failed} instances from {directory}, {failed} failed")
    return corpus

def random_corpus(count: int, seed: int, max_items: int = 12) -> Corpus:
    """Seeded random Euclidean corpus; sizes and per-instance seeds come from one PCG64 stream."""
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(count):
        params = RandomEuclideanParams(
            n=int(rng.integers(2, max_items + 1)),
            seed=int(rng.integers(0, 2 ** 31 - 1)),
            slack=RANDOM_SLACKS[i % len(RANDOM_SLACKS)],
        )
        corpus.append((f"random-{seed}-{i:04d}", gen_random_euclidean(params)))
    return corpus

class BenchService:
    """Runs every (instance, epsilon) pair and optionally persists the records."""

    def __init__(self, workers: Optional[int] = None,
                 repository: Optional[RunRepository] = None):
        """Initialize the service."""
        self.workers = config.bench_workers if workers is None else workers
        self.repository = repository

    def run(self, corpus: Corpus, epsilons: Sequence[float]) -> BenchResult:
        """Solve the corpus; records are ordered by instance id, then epsilon."""
        for epsilon in epsilons:
            if epsilon <= 0:
                raise ValueError(f"Epsilon must be positive, got {epsilon}")
        tasks = [(instance_id, instance, eps) for instance_id, instance in corpus for eps in epsilons]

        if self.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [pool.submit(run_instance, *task) for task in tasks]
                records = [future.result() for future in futures]
        else:
            records = [run_instance(*task) for task in tasks]

        records.sort(key=lambda r: (r.instance_id, r.epsilon))
        summary = summarize(records)
        logger.info(
            f"Bench finished: {summary.runs} runs, {summary.failures} failures, "
            f"all_ok={summary.all_ok}"
        )
        if self.repository is not None:
            self.repository.create_many(records)
            logger.info(f"Stored {len(records)} runs under batch {self.repository.batch_id}")
        return BenchResult(records=records, summary=summary)
