"""Report emission: CSV and JSON with locale-independent number formatting.

Floats are printed as decimal strings with 12 significant digits in both
formats; integers stay plain.  Every report embeds the resolved experiment
configuration (execution details like thread counts and paths are not part
of the configuration, so reruns at different parallelism are byte-identical).
"""

from __future__ import annotations

import json
import os


def fmt_number(v) -> str:
    """12-significant-digit decimal string for floats; ints verbatim."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


# fixed column orders, documented in the README
DISCREPANCY_COLUMNS = ["q", "a1", "a2", "delta_re", "delta_im", "delta_abs"]
PSI_COLUMNS = ["kind", "x", "y", "q", "a", "count"]
SIEVE_COLUMNS = ["trial", "x", "y", "Q", "weight_mode", "lhs", "rhs", "ratio"]
EXCEPTIONAL_COLUMNS = ["conductor", "chi_rank", "witness_X", "witness_value",
                       "threshold", "kind"]
IDENTITY_COLUMNS = ["check", "params", "residual", "tolerance", "ok"]
DECAY_COLUMNS = ["x", "y", "Q", "total", "psi", "normalized"]


def discrepancy_row(rec) -> dict:
    v = rec.primary()
    return {
        "q": rec.q, "a1": rec.a1, "a2": rec.a2,
        "delta_re": v.real, "delta_im": v.imag, "delta_abs": abs(v),
    }


def emit_csv(path: str, columns: list[str], rows: list[dict], config: dict):
    """CSV report: one '# config: {...}' comment line, header, then rows."""
    lines = ["# config: " + json.dumps(config, sort_keys=True)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt_number(row[c]) for c in columns))
    _write_atomic(path, "\n".join(lines) + "\n")


def emit_json(path: str, rows: list[dict], config: dict, summary: dict | None = None):
    """JSON report: {"config": ..., "summary": ..., "records": [...]}."""
    doc = {
        "config": config,
        "records": [{k: fmt_number(v) for k, v in row.items()} for row in rows],
    }
    if summary is not None:
        doc["summary"] = {k: fmt_number(v) for k, v in summary.items()}
    _write_atomic(path, json.dumps(doc, sort_keys=True, indent=1) + "\n")


def emit_report(path: str, fmt: str, columns: list[str], rows: list[dict],
                config: dict, summary: dict | None = None) -> str:
    if fmt == "csv":
        emit_csv(path, columns, rows, config)
    elif fmt == "json":
        emit_json(path, rows, config, summary)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path


def _write_atomic(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
