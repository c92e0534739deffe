import csv
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import torch
from yacs.config import CfgNode as Node

SIGNIFICANT_DIGITS = 17


def format_float(value: float) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def to_serializable(value: Any) -> Any:
    """Nested python types with floats kept exact and tensors/arrays as lists."""
    if isinstance(value, torch.Tensor):
        value = value.detach().cpu().numpy()
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return {"re": to_serializable(value.real), "im": to_serializable(value.imag)}
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if hasattr(value, "to_dict"):
        return to_serializable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): to_serializable(v) for k, v in value.items()}
    if isinstance(value, tuple) and hasattr(value, "_fields"):
        return {k: to_serializable(v) for k, v in value._asdict().items()}
    if isinstance(value, (list, tuple)):
        return [to_serializable(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return format_float(value)
    return value


class AtomicWriter(object):
    """Text file written to a temporary sibling and moved into place on a clean exit."""

    def __init__(self, file_path: os.PathLike):
        self.file_path = Path(file_path)
        self.file = None
        self._temporary = None

    def __enter__(self):
        self.file_path.parent.mkdir(parents=True, exist_ok=True)
        handle, self._temporary = tempfile.mkstemp(dir=self.file_path.parent, prefix=f".{self.file_path.name}.")
        self.file = os.fdopen(handle, "w", encoding="utf-8", newline="")
        return self.file

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.file.close()
        if exc_type is None:
            os.replace(self._temporary, self.file_path)
        else:
            os.unlink(self._temporary)


def config_sidecar_path(file_path: os.PathLike) -> Path:
    file_path = Path(file_path)
    return file_path.with_name(f"{file_path.stem}.config.json")


def write_json(file_path: os.PathLike, payload: Any) -> Path:
    with AtomicWriter(file_path) as file:
        json.dump(to_serializable(payload), file, indent=2)
        file.write("\n")
    return Path(file_path)


def read_json(file_path: os.PathLike) -> Any:
    with open(file_path, "r", encoding="utf-8") as file:
        return json.load(file)


def write_sidecar(file_path: os.PathLike, config: Optional[Node] = None, command: Optional[str] = None) -> Path:
    sidecar = {"command": command, "config": config if config is not None else {}}
    return write_json(config_sidecar_path(file_path), sidecar)


def header_with_units(columns: Sequence[Tuple[str, str]]) -> List[str]:
    return [f"{name} [{unit}]" if unit else name for name, unit in columns]


def write_csv(file_path: os.PathLike, columns: Sequence[Tuple[str, str]], rows: Iterable[Sequence],
              config: Optional[Node] = None, command: Optional[str] = None) -> Path:
    """RFC-4180 CSV with a `name [unit]` header row and a `<stem>.config.json` sidecar."""
    with AtomicWriter(file_path) as file:
        writer = csv.writer(file, lineterminator="\r\n")
        writer.writerow(header_with_units(columns))
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row of length {len(row)} for {len(columns)} columns")
            writer.writerow([v if isinstance(v, str) else format_float(v) for v in row])

    write_sidecar(file_path, config, command)
    return Path(file_path)


def read_csv(file_path: os.PathLike) -> Tuple[List[str], List[List[str]]]:
    with open(file_path, "r", encoding="utf-8", newline="") as file:
        reader = csv.reader(file)
        header = next(reader)
        return header, [row for row in reader]


def write_table(file_path: os.PathLike, columns: Sequence[Tuple[str, str]], rows: Sequence[Sequence],
                output_format: str = "csv", config: Optional[Node] = None, command: Optional[str] = None) -> Path:
    """Tabular output as CSV, or as JSON records keyed by column name."""
    file_path = Path(file_path)
    if output_format == "csv":
        return write_csv(file_path.with_suffix(".csv"), columns, rows, config, command)
    if output_format == "json":
        records: List[Dict[str, Any]] = [dict(zip([name for name, _ in columns], row)) for row in rows]
        target = write_json(file_path.with_suffix(".json"), {"columns": header_with_units(columns), "rows": records})
        write_sidecar(target, config, command)
        return target
    raise ValueError(f"unknown output format {output_format!r}")
