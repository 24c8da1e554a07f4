"""File formats.

* instance: JSON object ``{"mu_star": float, "sigmas": [float, ...], "seed": int}``
* samples: one value per line, no header, ``.17g``
* lower-bound row: CSV with header
  ``n,m,case,C_sigma,c_L,wrong_rate,bayes_error,L,ci,seed``
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import TextIO

import numpy as np

from ..core import GaussianInstance, SampleSet
from ..errors import DomainError, EmptyInputError

LOWERBOUND_HEADER = ("n", "m", "case", "C_sigma", "c_L", "wrong_rate", "bayes_error", "L", "ci", "seed")


def instance_to_json(instance: GaussianInstance, seed: int = 0) -> str:
    return json.dumps(
        {"mu_star": instance.mu_star, "sigmas": instance.sigmas.tolist(), "seed": int(seed)}
    )


def instance_from_json(text: str) -> tuple[GaussianInstance, int]:
    d = json.loads(text)
    try:
        return GaussianInstance(float(d["mu_star"]), d["sigmas"]), int(d.get("seed", 0))
    except KeyError as exc:
        raise DomainError(f"instance JSON missing {exc}") from None


def write_samples(samples: SampleSet, fh: TextIO) -> None:
    for v in samples.values:
        fh.write(format(float(v), ".17g") + "\n")


def read_samples(fh: TextIO, seed: int = 0) -> SampleSet:
    """Single-column CSV. Blank lines are skipped; a non-numeric first line is
    taken as a header."""
    values = []
    for lineno, row in enumerate(csv.reader(fh), start=1):
        if not row or not row[0].strip():
            continue
        if len(row) != 1:
            raise DomainError(f"line {lineno}: expected one column, got {len(row)}")
        try:
            values.append(float(row[0]))
        except ValueError:
            if lineno == 1 and not values:
                continue
            raise DomainError(f"line {lineno}: not a number: {row[0]!r}") from None
    if not values:
        raise EmptyInputError("no samples read")
    arr = np.array(values)
    if not np.all(np.isfinite(arr)):
        raise DomainError("samples must be finite")
    return SampleSet(arr, seed)


def read_samples_path(path: str | Path) -> SampleSet:
    with open(path, newline="") as fh:
        return read_samples(fh)


def lowerbound_csv(record: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOWERBOUND_HEADER)
    w.writerow(
        [
            format(record[k], ".17g") if isinstance(record[k], float) else record[k]
            for k in LOWERBOUND_HEADER
        ]
    )
    return buf.getvalue()
