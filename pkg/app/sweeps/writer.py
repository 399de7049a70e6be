import csv
import json
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

import app
from app.config import settings
from app.sweeps.runner import ResultTable
from app.sweeps.schemas import ConfigDocument, SidecarDocument, SweepSpec
from app.utils.logging import get_logger

logger = get_logger(__name__)


def format_column(values: np.ndarray, float_format: str) -> List[str]:
    """Integers and flags as plain integers, everything else in scientific notation."""
    if values.dtype.kind in "iub":
        return [str(int(value)) for value in values]
    return [format(float(value), float_format) for value in values]


def write_csv(path: Path, table: ResultTable, float_format: str = None) -> Path:
    float_format = float_format or settings.csv_float_format
    formatted = [
        format_column(np.asarray(values), float_format) for values in table.columns.values()
    ]

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(list(table.columns.keys()))
        w.writerows(zip(*formatted))
    return path


def build_sidecar(
    config: ConfigDocument,
    resolved: Dict[str, Any],
    spec: SweepSpec,
    name: str,
    outputs: List[str],
) -> SidecarDocument:
    """Sidecar echoing the effective config; it carries no timestamps so reruns match."""
    return SidecarDocument(
        config=config,
        resolved=resolved,
        sweep={"name": name, **spec.model_dump(mode="json")},
        outputs=outputs,
        software={"name": settings.service_name, "version": app.__version__},
    )


def dump_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def write_sidecar(path: Path, sidecar: SidecarDocument) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(sidecar.model_dump(mode="json")), encoding="utf-8")
    return path


def write_outputs(
    outdir,
    name: str,
    tables: List[ResultTable],
    config: ConfigDocument,
    resolved: Dict[str, Any],
    spec: SweepSpec,
) -> List[Path]:
    """Write ``<name>*.csv`` for every table and ``<name>.json``; returns all paths."""
    outdir = Path(outdir)
    csv_paths = [write_csv(outdir / f"{table.name}.csv", table) for table in tables]
    sidecar = build_sidecar(config, resolved, spec, name, [path.name for path in csv_paths])
    sidecar_path = write_sidecar(outdir / f"{name}.json", sidecar)

    logger.info(
        "outputs_written",
        outdir=str(outdir),
        files=[path.name for path in csv_paths] + [sidecar_path.name],
    )
    return csv_paths + [sidecar_path]
