"""JSON and CSV output with a fixed float format and the run config echoed in."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = ["fmt_float", "to_jsonable", "dump_json", "dump_csv", "write_output", "load_schema"]


def fmt_float(x) -> str:
    """17 significant digits, enough to reload every double bit for bit."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_jsonable(obj):
    """Convert numpy containers and scalars; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else fmt_float(x)
    if isinstance(obj, complex):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def dump_json(payload: dict) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n"


def dump_csv(header: Sequence[str], rows: Iterable[Sequence], config: dict | None = None) -> str:
    """CSV text; the config goes into a leading ``#`` comment line."""
    lines = []
    if config is not None:
        lines.append("# config: " + json.dumps(to_jsonable(config), sort_keys=True))
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, (float, np.floating)) else str(v)
                              for v in row))
    return "\n".join(lines) + "\n"


def write_output(text: str, out: str | None, stream=None) -> None:
    """Write to ``out`` (bytes exactly as given) or to ``stream``."""
    if out is None or out == "-":
        import sys

        (stream or sys.stdout).write(text)
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def load_schema(name: str) -> dict:
    """Bundled JSON schema for a CLI command's output."""
    text = resources.files("orbconv").joinpath("schemas", f"{name}.json").read_text("utf-8")
    return json.loads(text)
