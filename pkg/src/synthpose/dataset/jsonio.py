"""Canonical JSON emission for byte-stable dataset files.

Keys are sorted, floats are rendered with a fixed format, output is UTF-8
with a trailing newline. Regenerating a dataset with the same config and
seeds must therefore produce byte-identical documents.
"""

from __future__ import annotations

from typing import Any

import numpy as np

MM_FLOAT_FMT = "%.6f"  # fixed 6 decimals: <= 5e-7 error at any magnitude in range
CALIB_FLOAT_FMT = "%.9g"


def _render(value: Any, float_fmt: str, out: list[str]) -> None:
    if isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {type(key)}")
            out.append(f'"{key}":')
            _render(value[key], float_fmt, out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _render(item, float_fmt, out)
        out.append("]")
    elif isinstance(value, bool) or isinstance(value, np.bool_):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        f = float(value)
        if not np.isfinite(f):
            raise ValueError("non-finite float in JSON document")
        out.append(float_fmt % f)
    elif isinstance(value, str):
        import json as _json

        out.append(_json.dumps(value, ensure_ascii=False))
    elif value is None:
        out.append("null")
    elif isinstance(value, np.ndarray):
        _render(value.tolist(), float_fmt, out)
    else:
        raise TypeError(f"unsupported JSON value type: {type(value)}")


def dump_canonical_json(doc: Any, float_fmt: str = MM_FLOAT_FMT) -> str:
    out: list[str] = []
    _render(doc, float_fmt, out)
    out.append("\n")
    return "".join(out)


def write_canonical_json(doc: Any, path, float_fmt: str = MM_FLOAT_FMT) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_canonical_json(doc, float_fmt))
