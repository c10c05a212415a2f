"""CSV/JSON emission of experiment tables."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from . import __version__


def fmt(value) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def to_csv(rows: list[dict], config: dict) -> str:
    buf = io.StringIO()
    for key, value in config.items():
        buf.write(f"# {key} = {fmt(value) if not isinstance(value, (list, tuple)) else ' '.join(map(fmt, value))}\n")
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(row.get(k)) for k in header])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return value.item()
    return value


def to_json(rows: list[dict], config: dict, seed=None, extra: dict | None = None) -> str:
    doc = {
        "config": _jsonable(config),
        "rows": _jsonable(rows),
        "provenance": {"version": __version__, "seed": seed},
    }
    if extra:
        doc.update(_jsonable(extra))
    return json.dumps(doc, indent=1)


def write(rows, config, out: str | Path | None, fmt_name: str = "csv", seed=None, extra=None) -> str:
    text = to_json(rows, config, seed, extra) if fmt_name == "json" else to_csv(rows, config)
    if out is None:
        return text
    Path(out).write_text(text)
    return text


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def read_csv(path: str | Path) -> tuple[dict, list[dict]]:
    """Read back a CSV emitted by :func:`to_csv`: (config echo, rows as strings)."""
    config, body = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            config[key.strip()] = value.strip()
        else:
            body.append(line)
    return config, list(csv.DictReader(body))
