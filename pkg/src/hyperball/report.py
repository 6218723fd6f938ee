"""Deterministic JSON/CSV emission shared by all CLI commands.

Numbers are serialized as decimal strings with 12 significant digits so the
same configuration produces byte-identical output across platforms; wall-clock
metadata lives in a separate "meta" block excluded from that guarantee.
"""

from __future__ import annotations

import csv
import datetime
import json
from typing import Any

from . import __version__

__all__ = ["fmt_number", "canonical", "report_document", "write_json", "write_csv"]


def fmt_number(x) -> str:
    """Decimal string with 12 significant digits."""
    try:
        xf = float(x)
    except (TypeError, ValueError):
        return str(x)
    if xf != xf:
        return "nan"
    if xf in (float("inf"), float("-inf")):
        return "inf" if xf > 0 else "-inf"
    return f"{xf:.12g}"


def canonical(obj: Any) -> Any:
    """Recursively convert numbers to fixed-precision strings, keep structure."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int,)):
        return obj
    if isinstance(obj, float):
        return fmt_number(obj)
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    try:
        import numpy as np
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return fmt_number(float(obj))
        if isinstance(obj, np.ndarray):
            return [canonical(v) for v in obj.tolist()]
    except ImportError:
        pass
    return str(obj)


def report_document(config: dict, results: dict, certificates=None) -> dict:
    """Top-level report schema: {config, results, certificates, meta}."""
    return {
        "config": canonical(config),
        "results": canonical(results),
        "certificates": canonical(certificates if certificates is not None else []),
        "meta": {
            "generator": f"hyperball {__version__}",
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        },
    }


def write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([fmt_number(v) if isinstance(v, float) else v for v in row])
