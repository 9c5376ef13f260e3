"""CSV and metadata emission for result tables."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

from .experiment import ResultTable

CSV_HEADER = ("scheme", "snr_db", "subcarrier", "metric", "value", "seed")


def _num(x) -> str:
    return "" if x is None else format(float(x), ".12g")


def emit_csv(table: ResultTable, destination=None) -> bytes:
    """Serialize ``table`` as UTF-8 CSV with LF line endings.

    Rows are sorted by (scheme, snr_db, subcarrier, seed) and floats carry 12
    significant digits, so equal tables give identical bytes. ``destination``
    may be a path, a binary file object, or None (bytes only).
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in table.sorted_rows():
        sub = "" if r.subcarrier is None else str(r.subcarrier)
        writer.writerow((r.scheme, _num(r.snr_db), sub, r.metric, _num(r.value), r.seed))
    data = buf.getvalue().encode("utf-8")
    if destination is None:
        return data
    if hasattr(destination, "write"):
        destination.write(data)
        return data
    path = Path(destination)
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror}") from exc
    return data


def parse_csv(data) -> list[dict]:
    """Parse emitted CSV text (str or bytes) back into dicts with typed values."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        sub = rec["subcarrier"]
        rows.append(
            {
                "scheme": rec["scheme"],
                "snr_db": float(rec["snr_db"]) if rec["snr_db"] else None,
                "subcarrier": None if sub == "" else (sub if sub == "avg" else int(sub)),
                "metric": rec["metric"],
                "value": float(rec["value"]),
                "seed": int(rec["seed"]),
            }
        )
    return rows


def metadata_bytes(table: ResultTable) -> bytes:
    return (json.dumps(table.metadata, sort_keys=True, indent=2) + "\n").encode("utf-8")


def metadata_path(csv_path) -> Path:
    """Sidecar path: same stem as the CSV with a ``.meta.json`` suffix."""
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def write_outputs(table: ResultTable, csv_path) -> tuple[Path, Path]:
    """Write the CSV and its metadata sidecar; return both paths."""
    csv_path = Path(csv_path)
    emit_csv(table, csv_path)
    meta = metadata_path(csv_path)
    try:
        meta.write_bytes(metadata_bytes(table))
    except OSError as exc:
        raise OSError(f"cannot write metadata to {meta}: {exc.strerror}") from exc
    return csv_path, meta


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
