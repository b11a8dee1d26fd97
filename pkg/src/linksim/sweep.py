"""Sweep orchestration and CSV output."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import SimulationConfig
from .metrics import CSV_COLUMNS, BerRecord, run_point
from .theory import TheoryPoint, theory_point

__all__ = ["run_sweep", "sweep_rows", "theory_rows", "format_csv", "write_csv"]


def _run_one(args) -> BerRecord:
    config, scheme, index, ebn0, users, doppler = args
    return run_point(config, ebn0, scheme=scheme, users=users, doppler_hz=doppler, point_index=index)


def run_sweep(config: SimulationConfig, jobs: int = 1) -> list[BerRecord]:
    """Simulate every grid point; the result order never depends on ``jobs``."""
    tasks = [(config,) + point for point in config.grid()]
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(_run_one, tasks))


def theory_rows(scheme, channel, ebn0_values) -> list[dict]:
    rows = []
    for e in ebn0_values:
        tp: TheoryPoint = theory_point(scheme, channel, e)
        rows.append({
            "source": "theory", "scheme": tp.scheme.value, "channel": tp.channel.value,
            "ebn0_db": float(e), "ber": tp.ber, "ser": tp.ser,
        })
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def format_csv(rows) -> str:
    """Render rows (dicts or records) on the fixed column schema."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        if isinstance(row, BerRecord):
            row = row.row()
        writer.writerow([_cell(row.get(col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_csv(rows))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    return path


def sweep_rows(config: SimulationConfig, jobs: int = 1) -> list:
    """Simulation records, followed by closed-form rows when ``config.theory`` is set."""
    rows: list = list(run_sweep(config, jobs))
    if config.theory:
        for scheme in config.schemes:
            rows.extend(theory_rows(scheme, config.channel, config.ebn0_db))
    return rows
