"""
File utility functions.

Helpers for the output directory layout of the experiment harness: JSON
lines trajectories and two-column plot series, all written deterministically.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import pandas as pd

from src.core.logging import get_logger

logger = get_logger(__name__)


def ensure_dir(directory: Path) -> Path:
    """Create ``directory`` (and parents) if needed and return it."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def write_jsonl(records: Iterable[Dict[str, Any]], path: Path) -> int:
    """
    Write one JSON object per line with sorted keys.

    Args:
        records: Records to write
        path: Output file

    Returns:
        Number of records written
    """
    ensure_dir(Path(path).parent)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True))
            f.write("\n")
            count += 1
    logger.info(f"Wrote {count} records to {path}")
    return count


def read_jsonl(path: Path) -> List[Dict[str, Any]]:
    """Read a JSON lines file written by :func:`write_jsonl`."""
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def write_xy_csv(xs: Sequence[float], ys: Sequence[float], path: Path) -> Path:
    """
    Write an ``x,y`` series for plotting.

    Raises:
        ValueError: If the two sequences differ in length
    """
    if len(xs) != len(ys):
        raise ValueError(f"x and y lengths differ: {len(xs)} != {len(ys)}")
    ensure_dir(Path(path).parent)
    pd.DataFrame({"x": list(xs), "y": list(ys)}).to_csv(path, index=False, lineterminator="\n")
    logger.debug(f"Wrote plot series {path.name} ({len(xs)} points)")
    return path


def write_records_csv(records: Sequence[Dict[str, str]], columns: List[str], path: Path) -> Path:
    """Write string records as CSV with a fixed column order."""
    ensure_dir(Path(path).parent)
    frame = pd.DataFrame(list(records), columns=columns)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def read_records_csv(path: Path) -> List[Dict[str, str]]:
    """Read a CSV as string records; empty cells stay empty strings."""
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    return frame.to_dict(orient="records")
