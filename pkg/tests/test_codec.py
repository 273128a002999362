"""Tests for the JSON, DOT and CSV encodings."""
import math

from subtour_routing.models.schema import Instance, RunRecord, Schedule
from subtour_routing.services.approx_service import approx_schedule
from subtour_routing.storage.codec import (RUN_RECORD_COLUMNS, dumps_canonical,
                                           dumps_model, load_instance, load_schedule,
                                           loads_model, records_from_csv,
                                           records_to_csv, save_instance,
                                           save_schedule, schedule_to_dot, write_text)

class TestCanonicalJson:
    """Tests for the canonical JSON writer."""

    def test_layout(self):
        """Test indentation, inline scalar lists and null."""
        text = dumps_canonical({"a": [1, 2.5], "b": {"c": None}, "d": True})
        assert text == '{\n  "a": [1, 2.5],\n  "b": {\n    "c": null\n  },\n  "d": true\n}\n'

    def test_non_finite_floats(self):
        """Test that infinities and NaN become null."""
        assert dumps_canonical([math.inf, math.nan]) == "[null, null]\n"

    def test_float_digits(self):
        """Test the significant digit setting."""
        assert dumps_canonical(0.1, digits=3) == "0.1\n"
        assert dumps_canonical(1 / 3, digits=4) == "0.3333\n"

    def test_instance_round_trip(self, figure1, random_instances, tmp_path):
        """Test that saving a loaded canonical instance reproduces the file."""
        for i, instance in enumerate([figure1[0], *random_instances[:3]]):
            first = save_instance(instance, tmp_path / f"instance{i}.json")
            loaded = load_instance(first)
            second = save_instance(loaded, tmp_path / f"again{i}.json")
            assert first.read_bytes() == second.read_bytes()
            assert loaded == instance

    def test_schedule_round_trip(self, figure1, tmp_path):
        """Test a schedule over an explicit metric."""
        _, drawn = figure1
        first = save_schedule(drawn, tmp_path / "drawn.json")
        loaded = load_schedule(first)
        second = save_schedule(loaded, tmp_path / "drawn-again.json")
        assert first.read_bytes() == second.read_bytes()
        assert loaded == drawn

    def test_planar_schedule_round_trip(self, random_instances, tmp_path):
        """Test a solved planar schedule."""
        instance = random_instances[3]
        schedule = approx_schedule(instance, 0.5).schedule
        text = dumps_model(schedule)
        assert dumps_model(loads_model(Schedule, text)) == text

    def test_optional_fields_omitted(self, figure1):
        """Test that aux vertices carry no item id field."""
        _, schedule = figure1
        text = dumps_model(schedule)
        assert text.count('"item_id"') == 7

    def test_model_list(self, figure1):
        """Test encoding a list of models."""
        instance, _ = figure1
        text = dumps_model(list(instance.items[:2]))
        assert text.startswith("[\n  {\n")
        assert loads_model(Instance, dumps_model(instance)) == instance

class TestDot:
    """Tests for the DOT rendering."""

    def test_drawn_schedule(self, figure1):
        """Test one node per vertex and one labelled arc per tree edge."""
        instance, schedule = figure1
        dot = schedule_to_dot(instance, schedule)
        assert dot.startswith("digraph schedule {\n")
        assert dot.rstrip().endswith("}")
        arcs = [line for line in dot.splitlines() if "->" in line]
        assert len(arcs) == len(schedule.vertices) - 1
        assert '    v0 -> v1 [label="8"];' in arcs
        assert 'label="item p3\\np3"' in dot
        assert 'label="aux\\ns1"' in dot

    def test_write_creates_directories(self, figure1, tmp_path):
        """Test that write_text creates missing parent directories."""
        instance, schedule = figure1
        path = write_text(tmp_path / "out" / "schedule.dot", schedule_to_dot(instance, schedule))
        assert path.read_text().startswith("digraph")

class TestCsv:
    """Tests for the run table."""

    def test_round_trip(self):
        """Test that records survive the CSV table."""
        records = [
            RunRecord(instance_id="a", epsilon=0.5, n=3, delay=1 / 3, deadline=2.0,
                      travel=10.1, mst=5.0, vehicles=2, cost=12.1, cost_lb=4.0,
                      delay_ratio=1 / 6, length_ratio=2.02, cost_ratio=3.025,
                      guarantees_ok=True, wall_time=0.01),
            RunRecord(instance_id="b", epsilon=1.0, n=4, deadline=5.0, error="boom"),
        ]
        text = records_to_csv(records)
        assert text.splitlines()[0] == ",".join(RUN_RECORD_COLUMNS)
        assert records_from_csv(text) == records

    def test_column_order(self):
        """Test the fixed column order."""
        assert RUN_RECORD_COLUMNS[:3] == ["instance_id", "epsilon", "n"]
        assert RUN_RECORD_COLUMNS[-2:] == ["wall_time", "error"]
