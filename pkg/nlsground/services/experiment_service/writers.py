"""
CSV and JSON writers for run outputs.
"""
import datetime
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence

import pandas as pd

from nlsground.core.models.schemas import WaveFunction
from nlsground.services.experiment_service.records import ResultRecord

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class ResultWriter:
    """Writes tables and records under one output directory.

    Args:
        output_dir: Target directory, created on first write
        write_csv: Whether tables are written
        write_json: Whether records are written
    """

    def __init__(self, output_dir: str, write_csv: bool = True, write_json: bool = True):
        self.output_dir = Path(output_dir)
        self.write_csv = write_csv
        self.write_json = write_json
        self.written: List[Path] = []

    def _ensure_dir(self) -> None:
        if not self.output_dir.exists():
            os.makedirs(self.output_dir)
            logger.info(f"Created results directory: {self.output_dir}")

    def table(self, name: str, rows: Sequence[Mapping[str, Any]], columns: Sequence[str] = ()) -> Path:
        """Write rows as ``<name>.csv`` with 17 significant digits."""
        if not self.write_csv:
            return self.output_dir / f"{name}.csv"
        self._ensure_dir()
        frame = pd.DataFrame(list(rows), columns=list(columns) or None)
        path = self.output_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        self.written.append(path)
        logger.info(f"Saved table to: {path}")
        return path

    def record(self, record: ResultRecord) -> Path:
        """Write one record as ``<label>_<timestamp>.json``."""
        stamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S_%f")
        path = self.output_dir / f"{record.label}_{stamp}.json"
        if not self.write_json:
            return path
        self._ensure_dir()
        path.write_text(record.to_json())
        self.written.append(path)
        logger.info(f"Saved record to: {path}")
        return path

    def grid_dump(self, name: str, phi: WaveFunction) -> Path:
        """Write a wave function as x,value (1D) or x,y,value (2D) rows."""
        return self.table(name, grid_rows(phi))


def grid_rows(phi: WaveFunction) -> List[Dict[str, float]]:
    if phi.grid.dim == 1:
        return [{"x": float(x), "value": float(v)} for x, v in zip(phi.grid.axes()[0], phi.values)]
    x, y = phi.grid.mesh()
    return [{"x": float(a), "y": float(b), "value": float(v)}
            for a, b, v in zip(x.ravel(), y.ravel(), phi.values.ravel())]
