"""
Reports
-------
The pydantic model every CLI command emits, plus text and JSON rendering.
JSON is the machine contract; the text view is derived from the same model.
"""
import json
import logging
from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import Any, Dict

from pydantic import BaseModel, Field
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from monoid_functions import Letter, Presentation, Status, Verdict, format_word
from utils.hull import HullElement, format_hull
from utils.ideals import ConstructibleIdeal, GeneralizedIdeal

logger = logging.getLogger('reports')


class Report(BaseModel):
    command: str
    presentation: str
    presentation_hash: str
    truncation: Dict[str, Any] = Field(default_factory=dict)
    status: Status = Status.HOLDS
    result: Dict[str, Any] = Field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return {Status.HOLDS: 0, Status.FAILS: 1, Status.UNKNOWN: 2}[self.status]


def jsonable(value: Any) -> Any:
    """Words, ideals and hull elements become strings; sets become sorted lists."""
    if isinstance(value, Letter):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Verdict):
        return jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(jsonable(k)): jsonable(v) for k, v in value.items()}
    if isinstance(value, tuple) and value and all(isinstance(x, Letter) for x in value):
        return format_word(value)
    if isinstance(value, (set, frozenset)):
        return sorted((jsonable(v) for v in value), key=str)
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (ConstructibleIdeal, GeneralizedIdeal)):
        return value.describe()
    if isinstance(value, HullElement):
        return format_hull(value)
    if is_dataclass(value) and not isinstance(value, type):
        return jsonable(asdict(value))
    if isinstance(value, float) or isinstance(value, (int, str, bool)) or value is None:
        return value
    return str(value)


def make_report(command: str, p: Presentation, truncation: Dict[str, Any],
                status: Status, result: Dict[str, Any]) -> Report:
    return Report(
        command=command,
        presentation=p.name,
        presentation_hash=p.source_hash,
        truncation=jsonable(truncation),
        status=status,
        result=jsonable(result),
    )


def _cell(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return escape(json.dumps(value, ensure_ascii=False))
    return escape(str(value))


def render_text(report: Report, console: Console) -> None:
    table = Table(title=f"{report.command}: {escape(report.presentation)}", show_header=True)
    table.add_column("Field", style="cyan", no_wrap=True)
    table.add_column("Value", style="green")
    style = {Status.HOLDS: "green", Status.FAILS: "red", Status.UNKNOWN: "yellow"}[report.status]
    table.add_row("status", f"[{style}]{report.status.value}[/{style}]")
    table.add_row("presentation hash", report.presentation_hash[:16])
    for key, value in report.truncation.items():
        table.add_row(key, _cell(value))
    for key, value in report.result.items():
        table.add_row(key, _cell(value))
    console.print(table)


def render(report: Report, fmt: str, console: Console) -> None:
    if fmt == 'json':
        # plain stdout write keeps the JSON byte-identical across terminals
        console.file.write(report.model_dump_json(indent=2) + "\n")
        console.file.flush()
    else:
        render_text(report, console)
