"""
File helpers for the versioned JSON documents and the per-trial CSV reports.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence, Type, TypeVar

from pydantic import BaseModel, ValidationError

from app.shared.errors import InvalidInstanceError

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def read_json(path: str | Path, model: Type[M]) -> M:
    """Load and validate a JSON document, turning parse problems into domain errors."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InvalidInstanceError(f"Cannot read {path}: {e.strerror}")
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise InvalidInstanceError(f"Malformed {model.__name__} in {path}", details=str(e))


def read_raw_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInstanceError(f"Cannot parse JSON from {path}", details=str(e))


def dump_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=None) + "\n"


def write_json(path: str | Path, model: BaseModel) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dump_json(model))
    logger.debug(f"Wrote {target}")
    return target


def format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(row.get(column)) for column in header])
    return buffer.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[dict]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(render_csv(header, rows))
    logger.debug(f"Wrote {target}")
    return target
