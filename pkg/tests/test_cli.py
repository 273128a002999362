"""Tests for the command line."""
import json

import pytest

from conftest import chain_schedule, line_instance
from subtour_routing.config import config
from subtour_routing.main import main
from subtour_routing.models.schema import Schedule, Vertex, VertexKind
from subtour_routing.services.evaluation import schedule_cost, schedule_delay
from subtour_routing.services.generators import gen_figure1
from subtour_routing.storage.codec import (load_instance, load_schedule, save_instance,
                                           save_schedule)
from subtour_routing.storage.run_repository import RunRepository

@pytest.fixture(autouse=True)
def restore_config(monkeypatch):
    """Undo the config changes main() makes from its arguments."""
    for name in ("tolerance", "log_level", "results_db_path", "bench_workers"):
        monkeypatch.setattr(config, name, getattr(config, name))

@pytest.fixture
def drawn_files(tmp_path):
    """The seven-item instance (deadline 30) and its drawn schedule on disk."""
    instance, schedule = gen_figure1(sigma=2.0)
    return (save_instance(instance, tmp_path / "instance.json"),
            save_schedule(schedule, tmp_path / "schedule.json"))

def run(capsys, *argv):
    """Run the command line and return its status and parsed stdout."""
    status = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return status, (json.loads(out) if out.strip() else None)

class TestCheck:
    """Tests for the feasibility command."""

    def test_feasible(self, drawn_files, capsys):
        """Test exit 0 and the minimum delay."""
        status, report = run(capsys, "check", drawn_files[0])
        assert status == 0
        assert report == {"min_delay": 21, "deadline": 30, "feasible": True}

    def test_infeasible(self, tmp_path, capsys):
        """Test exit 3 below the minimum delay."""
        instance, _ = gen_figure1(deadline=20.0)
        status, report = run(capsys, "check", save_instance(instance, tmp_path / "i.json"))
        assert status == 3
        assert report["feasible"] is False

    def test_missing_file(self, tmp_path, capsys):
        """Test that an unreadable instance is an input error."""
        status, _ = run(capsys, "check", tmp_path / "missing.json")
        assert status == 2

    def test_invalid_instance(self, tmp_path, capsys):
        """Test that a malformed instance is an input error."""
        path = tmp_path / "bad.json"
        path.write_text('{"metric": {"type": "euclidean2d"}, "root": [0, 0], "items": []}')
        status, _ = run(capsys, "check", path)
        assert status == 2

class TestSolve:
    """Tests for the approximation command."""

    def test_writes_schedule_and_dot(self, drawn_files, tmp_path, capsys):
        """Test exit 0 and that the written schedule passes eval."""
        out = tmp_path / "solved.json"
        dot = tmp_path / "solved.dot"
        status, report = run(capsys, "solve", drawn_files[0], "--epsilon", "0.5",
                             "--out", out, "--dot", dot)
        assert status == 0
        assert report["guarantees_ok"] is True
        assert report["epsilon"] == 0.5
        assert load_schedule(out) is not None
        assert dot.read_text().startswith("digraph")

        status, evaluated = run(capsys, "eval", drawn_files[0], out, "--deadline-factor", "3")
        assert status == 0
        assert evaluated["valid"] is True

    def test_report_is_reproducible(self, drawn_files, tmp_path, capsys):
        """Test identical reports across runs and that the written files agree with them."""
        out = tmp_path / "solved.json"
        dot = tmp_path / "solved.dot"
        argv = ["solve", str(drawn_files[0]), "--epsilon", "0.25", "--out", str(out),
                "--dot", str(dot)]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first

        report = json.loads(first)
        instance = load_instance(drawn_files[0])
        schedule = load_schedule(out)
        assert schedule_delay(instance, schedule) == report["delay"]
        assert schedule_cost(instance, schedule).model_dump() == report["cost"]
        arcs = [line for line in dot.read_text().splitlines() if "->" in line]
        assert len(arcs) == len(schedule.vertices) - 1

    def test_slack(self, drawn_files, capsys):
        """Test that --slack picks epsilon = slack / 4."""
        status, report = run(capsys, "solve", drawn_files[0], "--slack", "2")
        assert status == 0
        assert report["epsilon"] == 0.5

    def test_infeasible(self, tmp_path, capsys):
        """Test exit 3 with the minimum delay on stdout."""
        instance, _ = gen_figure1(deadline=20.0)
        status, report = run(capsys, "solve", save_instance(instance, tmp_path / "i.json"))
        assert status == 3
        assert report == {"feasible": False, "min_delay": 21, "deadline": 20}

    def test_rejects_zero_epsilon(self, drawn_files):
        """Test that argparse refuses a non-positive epsilon."""
        with pytest.raises(SystemExit) as info:
            main(["solve", str(drawn_files[0]), "--epsilon", "0"])
        assert info.value.code == 2

class TestEval:
    """Tests for the evaluation command."""

    def test_drawn_schedule(self, drawn_files, capsys):
        """Test delay 30 and cost 23 + 4 * 2."""
        status, report = run(capsys, "eval", *drawn_files)
        assert status == 0
        assert report["delay"] == 30
        assert report["meets_deadline"] is True
        assert report["cost"] == {"travel": 23, "setup": 8, "total": 31, "vehicle_count": 4}

    def test_missed_deadline(self, tmp_path, capsys):
        """Test exit 3 when the schedule is valid but late, and the deadline factor."""
        instance, schedule = gen_figure1(deadline=25.0)
        paths = (save_instance(instance, tmp_path / "i.json"),
                 save_schedule(schedule, tmp_path / "s.json"))
        status, report = run(capsys, "eval", *paths)
        assert status == 3
        assert report["meets_deadline"] is False
        status, _ = run(capsys, "eval", *paths, "--deadline-factor", "1.2")
        assert status == 0

    def test_root_with_two_children(self, tmp_path, capsys):
        """Test that a root splitting at once is evaluated through an aux vertex."""
        instance = line_instance([1.0, 2.0])
        schedule = Schedule(root=0, vertices=(
            Vertex(id=0, kind=VertexKind.ROOT, loc=instance.root, children=(1, 2)),
            Vertex(id=1, kind=VertexKind.ITEM, item_id="p1", loc=(1.0, 0.0)),
            Vertex(id=2, kind=VertexKind.ITEM, item_id="p2", loc=(2.0, 0.0)),
        ))
        status, report = run(capsys, "eval", save_instance(instance, tmp_path / "i.json"),
                             save_schedule(schedule, tmp_path / "s.json"))
        assert status == 0
        assert report["valid"] is True
        assert report["cost"]["travel"] == 3
        assert report["cost"]["vehicle_count"] == 2

    def test_invalid_schedule(self, drawn_files, tmp_path, capsys):
        """Test exit 2 and the violation report for a foreign schedule."""
        foreign = chain_schedule(line_instance([1.0] * 7))
        path = save_schedule(foreign, tmp_path / "foreign.json")
        status, report = run(capsys, "eval", drawn_files[0], path)
        assert status == 2
        assert report["ok"] is False
        codes = {v["code"] for v in report["violations"]}
        assert {"root_location", "invalid_location", "item_location"} <= codes

class TestBoundsAndOracle:
    """Tests for the bound and oracle commands."""

    def test_bounds(self, drawn_files, capsys):
        """Test the subset bound and the deadline conditions."""
        status, report = run(capsys, "bounds", drawn_files[0])
        assert status == 0
        assert report["bounds"]["delay_lb"] == 21
        assert report["deadline_conditions"]["binding"] == 21

    def test_oracle_delay(self, drawn_files, capsys):
        """Test the permutation oracle on seven items."""
        status, report = run(capsys, "oracle", drawn_files[0])
        assert status == 0
        assert report["best_value"] == 21
        assert report["search_space_size"] == 5040

    def test_oracle_subset(self, drawn_files, capsys):
        """Test the subset oracle."""
        status, report = run(capsys, "oracle", drawn_files[0], "--objective", "subset")
        assert status == 0
        assert report == {"best_value": 21}

    def test_oracle_guard(self, tmp_path, capsys):
        """Test that the cost oracle refuses planar instances."""
        path = save_instance(line_instance([1.0, 2.0]), tmp_path / "line.json")
        status, _ = run(capsys, "oracle", path, "--objective", "cost")
        assert status == 2

class TestGen:
    """Tests for the generator command."""

    def test_drawn_family_with_schedule(self, tmp_path, capsys):
        """Test writing both files and evaluating them."""
        instance_path = tmp_path / "gen" / "figure1.json"
        schedule_path = tmp_path / "gen" / "drawn.json"
        status, report = run(capsys, "gen", "figure1", "--sigma", "1.5",
                             "--out", instance_path, "--schedule-out", schedule_path)
        assert status == 0
        assert report is None
        assert load_instance(instance_path).sigma == 1.5

        status, evaluated = run(capsys, "eval", instance_path, schedule_path)
        assert status == 0
        assert evaluated["cost"]["total"] == 29

    def test_stdout(self, capsys):
        """Test that the instance is printed without --out."""
        status, report = run(capsys, "gen", "random_euclidean", "--n", "4", "--seed", "3")
        assert status == 0
        assert len(report["items"]) == 4
        assert report["metric"]["type"] == "euclidean2d"

    def test_schedule_out_needs_drawn_family(self, tmp_path, capsys):
        """Test that --schedule-out is refused for other families."""
        status, _ = run(capsys, "gen", "tight", "--k", "3", "--epsilon", "0.5",
                        "--schedule-out", tmp_path / "s.json")
        assert status == 2

    def test_invalid_parameters(self, capsys):
        """Test that generator validation errors are input errors."""
        status, _ = run(capsys, "gen", "steiner", "--n", "3", "--epsilon", "0.75")
        assert status == 2

class TestBench:
    """Tests for the benchmark command."""

    def test_random_corpus(self, tmp_path, capsys):
        """Test the summary, the CSV table and the database."""
        csv_path = tmp_path / "runs.csv"
        db_path = tmp_path / "runs.db"
        status, summary = run(capsys, "bench", "--random", "3", "--seed", "1",
                              "--epsilons", "0.5", "1.0", "--workers", "1",
                              "--csv", csv_path, "--db", db_path)
        assert status == 0
        assert summary["runs"] == 6
        assert summary["failures"] == 0
        assert summary["all_ok"] is True
        assert len(csv_path.read_text().splitlines()) == 7

        stored = RunRepository(db_url=f"sqlite:///{db_path}").get_all()
        assert len(stored) == 6

    def test_corpus_directory(self, tmp_path, capsys):
        """Test a directory mixing an instance file and a generator spec."""
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        save_instance(gen_figure1(deadline=21.0)[0], corpus / "drawn.json")
        (corpus / "tight.json").write_text('{"family": "tight", "k": 3, "epsilon": 0.5}')
        json_path = tmp_path / "result.json"
        status, summary = run(capsys, "bench", corpus, "--epsilons", "1.0",
                              "--workers", "1", "--json", json_path)
        assert status == 0
        assert summary["runs"] == 2
        result = json.loads(json_path.read_text())
        assert [r["instance_id"] for r in result["records"]] == ["drawn", "tight"]

    def test_corrupt_corpus_file(self, tmp_path, capsys):
        """Test that a malformed file is recorded as a failure and the run goes on."""
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        save_instance(gen_figure1()[0], corpus / "a.json")
        (corpus / "b.json").write_text("{not json")
        csv_path = tmp_path / "runs.csv"
        status, summary = run(capsys, "bench", corpus, "--epsilons", "1.0",
                              "--workers", "1", "--csv", csv_path)
        assert status == 0
        assert summary["runs"] == 2
        assert summary["failures"] == 1
        assert len(csv_path.read_text().splitlines()) == 3

    def test_needs_a_corpus(self, capsys):
        """Test that bench without input is an input error."""
        status, _ = run(capsys, "bench")
        assert status == 2

class TestGlobalOptions:
    """Tests for options shared by every command."""

    def test_tolerance_updates_config(self, drawn_files, capsys):
        """Test that --tolerance reaches the global config."""
        status, _ = run(capsys, "--tolerance", "1e-6", "--log-level", "DEBUG",
                        "check", drawn_files[0])
        assert status == 0
        assert config.tolerance == 1e-6
        assert config.log_level == "DEBUG"

    def test_rejects_bad_tolerance(self, drawn_files):
        """Test that a negative tolerance is refused."""
        with pytest.raises(SystemExit):
            main(["--tolerance", "-1", "check", str(drawn_files[0])])
