#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Report writer for AttractorKit.

JSON for nested, provenance-tagged reports; CSV for series; a declarative
plot manifest that names the CSV columns to draw. Every file is written to a
temporary name in the target directory and renamed into place.
"""

import json
import logging
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd


def report_timestamp() -> str:
    """UTC timestamp, pinned by SOURCE_DATE_EPOCH when it is set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc)
    return moment.replace(microsecond=0).isoformat().replace("+00:00", "Z")


def to_jsonable(value: Any) -> Any:
    """Plain JSON values; non-finite floats become null and complex numbers {re, im}."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return value


class ReportWriter:
    """Writes run artifacts into one output directory"""

    def __init__(self, out_dir, fmt: str = "json", schema_version: int = 1,
                 toolkit_version: str = "0.0.0"):
        """
        Initialize the report writer.

        Args:
            out_dir: Output directory, created when missing
            fmt: ``json`` or ``csv`` for tabular results
            schema_version: Report schema version
            toolkit_version: Version recorded in every report
        """
        self.out_dir = Path(out_dir)
        self.format = fmt
        self.schema_version = int(schema_version)
        self.toolkit_version = toolkit_version
        self.written: List[Path] = []
        self.logger = logging.getLogger("attractorkit.report_writer")

    def _atomic_write(self, name: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        target = self.out_dir / name
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", suffix=".tmp", dir=self.out_dir)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(target)
        self.logger.debug(f"Wrote {target}")
        return target

    def envelope(self, kind: str, payload: Dict[str, Any], run: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "toolkit_version": self.toolkit_version,
            "report": kind,
            "timestamp": report_timestamp(),
            "run": run or {},
            **payload,
        }

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)
        return self._atomic_write(name, text + "\n")

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        return self._atomic_write(name, frame.to_csv(index=False, float_format="%.17g", lineterminator="\n"))

    def write_table(self, stem: str, rows: Sequence[Dict[str, Any]]) -> Path:
        """Rows as CSV or as a JSON list, following the selected format."""
        if self.format == "csv":
            return self.write_csv(f"{stem}.csv", pd.DataFrame(list(rows)))
        return self.write_json(f"{stem}.json", {"rows": list(rows)})

    def write_plot_manifest(self, name: str, plots: Sequence[Dict[str, Any]]) -> Path:
        """
        Declarative plot description.

        Each plot names a CSV file, its x column, the y series and log flags.
        """
        manifest = {"schema_version": self.schema_version, "plots": [
            {"title": plot.get("title", ""), "data": plot["data"], "x": plot["x"], "series": list(plot["series"]),
             "log_x": bool(plot.get("log_x", False)), "log_y": bool(plot.get("log_y", False))}
            for plot in plots]}
        return self.write_json(name, manifest)
