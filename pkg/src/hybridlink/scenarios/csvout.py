"""
CSV result artifacts.

Each artifact starts with a ``# key = value`` preamble that records the scenario
and every resolved parameter, followed by a header row and the data written
with 12 significant digits.
"""

import io
from collections.abc import Mapping
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

from hybridlink.errors import NonFiniteOutputError

ARTIFACT_VERSION = "1"
FLOAT_FORMAT = "%.12g"


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def check_finite(frame: pd.DataFrame) -> None:
    """
    Raise NonFiniteOutputError if a numeric column holds NaN or infinity.
    """
    numeric = frame.select_dtypes(include=[np.number])
    if numeric.empty:
        return
    bad = ~np.isfinite(numeric.to_numpy(dtype=float))
    if bad.any():
        columns = sorted({numeric.columns[j] for j in np.nonzero(bad)[1]})
        raise NonFiniteOutputError(f"non-finite values in column(s): {', '.join(columns)}")


def render_artifact(
    frame: pd.DataFrame,
    metadata: Mapping[str, Any],
    timestamp: bool = True,
) -> str:
    """
    Render a result table with its preamble.

    Args:
        frame: Result table.
        metadata: Preamble entries, written in order.
        timestamp: Append a created_at entry.

    Returns:
        Full artifact text.
    """
    check_finite(frame)
    lines = [f"# artifact_version = {ARTIFACT_VERSION}"]
    lines += [f"# {key} = {_format_value(value)}" for key, value in metadata.items()]
    if timestamp:
        lines.append(f"# created_at = {datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return "\n".join(lines) + "\n" + body


def write_artifact(
    frame: pd.DataFrame,
    path: Optional[Path],
    metadata: Mapping[str, Any],
    timestamp: bool = True,
) -> str:
    """Render an artifact and write it to ``path`` when one is given."""
    text = render_artifact(frame, metadata, timestamp)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def read_artifact(source: Path | str) -> tuple[dict[str, str], pd.DataFrame]:
    """
    Read an artifact back into its preamble and table.

    Args:
        source: Path to an artifact, or the artifact text itself.
    """
    text = source.read_text(encoding="utf-8") if isinstance(source, Path) else source
    metadata: dict[str, str] = {}
    body: list[str] = []
    for line in text.splitlines():
        if line.startswith("# ") and not body:
            key, _, value = line[2:].partition(" = ")
            metadata[key.strip()] = value.strip()
        else:
            body.append(line)
    return metadata, pd.read_csv(io.StringIO("\n".join(body)))
