"""Canonical JSON, DOT and CSV encodings of instances, schedules and reports.

Canonical JSON keeps model field order, indents by two spaces, writes lists
of scalars on one line, formats floats with a fixed number of significant
digits and omits unset optional fields. Loading a canonical file and writing
it again reproduces it byte for byte.
"""
import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Optional, Type, TypeVar, Union

from pydantic import BaseModel

from subtour_routing.config import config
from subtour_routing.models.schema import Instance, RunRecord, Schedule, VertexKind
from subtour_routing.utils import format_float

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)

RUN_RECORD_COLUMNS: List[str] = list(RunRecord.model_fields)

def _is_scalar(value: Any) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))

def _encode_scalar(value: Any, digits: int) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        return format_float(value, digits)
    return json.dumps(value, ensure_ascii=False)

def _encode(value: Any, level: int, digits: int) -> str:
    pad = "  " * (level + 1)
    close = "  " * level
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f"{pad}{json.dumps(key, ensure_ascii=False)}: {_encode(item, level + 1, digits)}"
            for key, item in value.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + close + "}"
    if isinstance(value, (list, tuple)):
        if all(_is_scalar(item) for item in value):
            return "[" + ", ".join(_encode_scalar(item, digits) for item in value) + "]"
        parts = [pad + _encode(item, level + 1, digits) for item in value]
        return "[\n" + ",\n".join(parts) + "\n" + close + "]"
    return _encode_scalar(value, digits)

def dumps_canonical(data: Any, digits: Optional[int] = None) -> str:
    """Encode plain JSON data canonically, with a trailing newline."""
    return _encode(data, 0, config.float_digits if digits is None else digits) + "\n"

def dumps_model(model: Union[BaseModel, List[BaseModel]], digits: Optional[int] = None) -> str:
    """Canonical JSON of a model, or of a list of models."""
    if isinstance(model, list):
        data = [m.model_dump(mode="json", exclude_none=True) for m in model]
    else:
        data = model.model_dump(mode="json", exclude_none=True)
    return dumps_canonical(data, digits)

def loads_model(model_type: Type[M], text: str) -> M:
    """Parse and validate a model from JSON text."""
    return model_type.model_validate_json(text)

def _read(path: Path) -> str:
    return Path(path).read_text(encoding="utf-8")

def write_text(path: Path, text: str) -> Path:
    """Write text to a file, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path

def load_instance(path: Path) -> Instance:
    """Load an instance file."""
    return loads_model(Instance, _read(path))

def save_instance(instance: Instance, path: Path) -> Path:
    """Write an instance file in canonical JSON."""
    return write_text(path, dumps_model(instance))

def load_schedule(path: Path) -> Schedule:
    """Load a schedule file."""
    return loads_model(Schedule, _read(path))

def save_schedule(schedule: Schedule, path: Path) -> Path:
    """Write a schedule file in canonical JSON."""
    return write_text(path, dumps_model(schedule))

def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')

def schedule_to_dot(instance: Instance, schedule: Schedule) -> str:
    """DOT digraph of a schedule; nodes show kind and location, arcs their length."""
    metric = instance.metric
    dot = "digraph schedule {\n"
    for v in schedule.vertices:
        head = f"item {v.item_id}" if v.kind == VertexKind.ITEM else v.kind.value
        label = _dot_escape(f"{head}\n{metric.label(v.loc)}").replace("\n", "\\n")
        shape = "box" if v.kind == VertexKind.ITEM else "ellipse"
        dot += f'    v{v.id} [label="{label}", shape={shape}];\n'
    for parent, child in schedule.arcs():
        length = metric.distance(schedule.vertex(parent).loc, schedule.vertex(child).loc)
        dot += f'    v{parent} -> v{child} [label="{length:g}"];\n'
    dot += "}\n"
    return dot

def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)

def records_to_csv(records: Iterable[RunRecord]) -> str:
    """CSV table of benchmark records in the fixed column order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RUN_RECORD_COLUMNS)
    for record in records:
        writer.writerow(_csv_cell(getattr(record, column)) for column in RUN_RECORD_COLUMNS)
    return buffer.getvalue()

def records_from_csv(text: str) -> List[RunRecord]:
    """Parse a CSV table written by records_to_csv."""
    rows = csv.DictReader(io.StringIO(text))
    records = []
    for row in rows:
        data = {key: value for key, value in row.items() if value != ""}
        if "guarantees_ok" in data:
            data["guarantees_ok"] = data["guarantees_ok"] == "true"
        records.append(RunRecord.model_validate(data))
    return records
