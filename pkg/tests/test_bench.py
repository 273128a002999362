"""Tests for the benchmark harness and the run store."""
import math

import pytest

from conftest import line_instance
from subtour_routing.models.schema import RunRecord
from subtour_routing.services.bench_service import (BenchService, load_corpus,
                                                    random_corpus, run_instance,
                                                    summarize)
from subtour_routing.services.generators import gen_figure1
from subtour_routing.storage.codec import save_instance
from subtour_routing.storage.run_repository import RunRepository

@pytest.fixture
def repository(tmp_path):
    """A run store in a temporary SQLite file."""
    return RunRepository(db_url=f"sqlite:///{tmp_path}/runs.db", batch_id="batch-a")

def record(instance_id, epsilon, **fields):
    return RunRecord(instance_id=instance_id, epsilon=epsilon, **fields)

class TestRunInstance:
    """Tests for single runs."""

    def test_solved(self):
        """Test a record with consistent ratios."""
        instance, _ = gen_figure1(deadline=21.0)
        result = run_instance("drawn", instance, 1.0)
        assert result.error is None
        assert result.n == 7
        assert result.guarantees_ok
        assert result.ratios_consistent()
        assert result.wall_time >= 0

    def test_failure_becomes_record(self):
        """Test that an infeasible instance yields a record with an error."""
        result = run_instance("late", line_instance([1.0, 1.0, 1.0], deadline=2.0), 1.0)
        assert result.error is not None
        assert "infeasible" in result.error
        assert not result.guarantees_ok

class TestSummarize:
    """Tests for the aggregate."""

    def test_empty(self):
        """Test an empty table."""
        summary = summarize([])
        assert summary.runs == 0
        assert summary.all_ok
        assert summary.max_cost_ratio == 0.0

    def test_maxima_and_failures(self):
        """Test the largest ratios and the normalized cost ratio."""
        records = [
            record("a", 1.0, delay_ratio=1.5, length_ratio=3.0, cost_ratio=6.0,
                   guarantees_ok=True),
            record("b", 0.5, delay_ratio=2.0, length_ratio=2.0, cost_ratio=8.0,
                   guarantees_ok=True),
            record("c", 1.0, error="boom"),
        ]
        summary = summarize(records)
        assert (summary.runs, summary.failures) == (3, 1)
        assert not summary.all_ok
        assert summary.max_delay_ratio == 2.0
        assert summary.max_length_ratio == 3.0
        assert summary.max_cost_ratio == 8.0
        assert summary.max_normalized_cost_ratio == pytest.approx(0.5)

class TestCorpus:
    """Tests for corpus loading."""

    def test_random_corpus(self):
        """Test ids, sizes and determinism."""
        corpus = random_corpus(5, seed=4, max_items=6)
        assert [name for name, _ in corpus] == [f"random-4-{i:04d}" for i in range(5)]
        assert all(2 <= instance.n <= 6 for _, instance in corpus)
        assert corpus == random_corpus(5, seed=4, max_items=6)
        assert [instance.deadline > 0 for _, instance in corpus] == [True] * 5

    def test_directory(self, tmp_path):
        """Test instance files and generator specs, sorted by file name."""
        save_instance(gen_figure1()[0], tmp_path / "b-drawn.json")
        (tmp_path / "a-tight.json").write_text('{"family": "tight", "k": 3, "epsilon": 0.5}')
        (tmp_path / "notes.txt").write_text("ignored")
        corpus = load_corpus(tmp_path)
        assert [name for name, _ in corpus] == ["a-tight", "b-drawn"]
        assert corpus[0][1].n == 10

    def test_unreadable_file_becomes_failed_run(self, tmp_path):
        """Test that one corrupt file fails its own runs and the rest still solve."""
        save_instance(gen_figure1()[0], tmp_path / "a.json")
        (tmp_path / "b.json").write_text("{not json")
        corpus = load_corpus(tmp_path)
        assert [name for name, _ in corpus] == ["a", "b"]
        assert isinstance(corpus[1][1], str)

        result = BenchService(workers=1).run(corpus, [0.5, 1.0])
        failed = [r for r in result.records if r.error is not None]
        assert [(r.instance_id, r.epsilon) for r in failed] == [("b", 0.5), ("b", 1.0)]
        assert all("JSONDecodeError" in r.error for r in failed)
        assert result.summary.runs == 4
        assert result.summary.failures == 2
        assert not result.summary.all_ok

class TestBenchService:
    """Tests for the harness."""

    def test_empty_corpus(self):
        """Test that no instances give an empty, passing result."""
        result = BenchService(workers=1).run([], [0.5])
        assert result.records == []
        assert result.summary.all_ok

    def test_record_order(self):
        """Test ordering by instance id, then epsilon."""
        corpus = random_corpus(2, seed=0, max_items=5)
        result = BenchService(workers=1).run(list(reversed(corpus)), [1.0, 0.25])
        keys = [(r.instance_id, r.epsilon) for r in result.records]
        assert keys == sorted(keys)
        assert len(keys) == 4
        assert result.summary.all_ok
        assert all(r.ratios_consistent() for r in result.records)

    def test_guarantee_normalization(self):
        """Test that every cost ratio stays within 8 + 4/epsilon."""
        result = BenchService(workers=1).run(random_corpus(4, seed=9), [0.25, 2.0])
        assert result.summary.max_normalized_cost_ratio <= 1 + 1e-9
        assert all(math.isfinite(r.cost_ratio) for r in result.records)

    def test_rejects_non_positive_epsilon(self):
        """Test the epsilon check before any run."""
        with pytest.raises(ValueError):
            BenchService(workers=1).run(random_corpus(1, seed=0), [0.0])

    def test_stores_records(self, repository):
        """Test that results are persisted under the batch id."""
        result = BenchService(workers=1, repository=repository).run(
            random_corpus(2, seed=1, max_items=4), [1.0]
        )
        assert repository.search(batch_id="batch-a") == result.records

class TestRunRepository:
    """Tests for the SQLite run store."""

    def test_create_and_get(self, repository):
        """Test a stored record read back by row id."""
        stored = record("x", 0.5, n=3, delay=2.5, deadline=5.0, guarantees_ok=True)
        repository.create(stored)
        assert repository.get(1) == stored
        assert repository.get(99) is None

    def test_search(self, repository):
        """Test filters on instance, epsilon, guarantees and failures."""
        repository.create_many([
            record("x", 0.5, guarantees_ok=True),
            record("x", 1.0, guarantees_ok=False),
            record("y", 0.5, error="boom"),
        ])
        assert len(repository.search(instance_id="x")) == 2
        assert [r.instance_id for r in repository.search(epsilon=0.5)] == ["x", "y"]
        assert [r.epsilon for r in repository.search(guarantees_ok=True)] == [0.5]
        assert [r.instance_id for r in repository.search(failed=True)] == ["y"]
        assert len(repository.search(failed=False)) == 2

    def test_update(self, repository):
        """Test overwriting a record of the current batch."""
        repository.create(record("x", 0.5, delay=1.0))
        repository.update(record("x", 0.5, delay=2.0))
        assert repository.get_all()[0].delay == 2.0
        with pytest.raises(ValueError):
            repository.update(record("missing", 0.5))

    def test_delete(self, repository):
        """Test deleting by row id."""
        repository.create(record("x", 0.5))
        repository.delete(1)
        assert repository.get_all() == []
        with pytest.raises(ValueError):
            repository.delete(1)

    def test_batches(self, tmp_path):
        """Test that two repositories on one file keep separate batches."""
        url = f"sqlite:///{tmp_path}/shared.db"
        first = RunRepository(db_url=url, batch_id="b1")
        second = RunRepository(db_url=url, batch_id="b2")
        first.create(record("x", 0.5))
        second.create(record("x", 0.5))
        assert second.batches() == ["b1", "b2"]
        assert len(second.search(batch_id="b1")) == 1
        assert len(first.get_all()) == 2
