"""Deterministic artifact writers: CSV, JSON summaries, TOML manifests.

All floating-point output is serialised with 17 significant digits so that
runs are byte-reproducible across readers and repeated invocations; keys are
emitted in sorted order and nothing time- or locale-dependent is written.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

__all__ = ["fmt_value", "write_csv", "write_json", "write_toml"]


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        return fmt_float(float(v))
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt_value(v) for v in row) + "\n")


def _json_value(v, indent: int) -> str:
    pad = "  " * indent
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        x = float(v)
        if not math.isfinite(x):
            return f'"{fmt_float(x)}"'
        return fmt_float(x)
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if isinstance(v, Mapping):
        if not v:
            return "{}"
        items = [
            f'{pad}  "{k}": {_json_value(v[k], indent + 1)}' for k in sorted(v)
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(v, (list, tuple)):
        if not len(v):
            return "[]"
        items = [f"{pad}  {_json_value(x, indent + 1)}" for x in v]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot serialise {type(v)!r}")


def write_json(path, obj) -> None:
    """Canonical JSON: sorted keys, 17-digit floats, fixed layout."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(_json_value(obj, 0) + "\n")


def _toml_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        s = fmt_float(float(v))
        if s in ("nan", "inf", "-inf"):
            return s
        if not any(c in s for c in ".eE"):
            s += ".0"
        return s
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v)!r} to TOML")


def write_toml(path, sections: Mapping[str, Mapping[str, object]]) -> None:
    """Sectioned key-value manifest with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for section in sorted(sections):
        lines.append(f"[{section}]")
        body = sections[section]
        for key in sorted(body):
            lines.append(f"{key} = {_toml_scalar(body[key])}")
        lines.append("")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
