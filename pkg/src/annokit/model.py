"""Shared data model: annotation frames, label mappings, project configuration.

An annotation frame is a plain pandas DataFrame following a few column
conventions:

* ``sample_id``      unique, non-empty string key per row
* ``<annotator>``    raw label given by that annotator (empty = missing)
* ``re_<annotator>`` second pass by the same annotator, same row
* ``<annotator>_prob`` / ``re_<annotator>_prob`` / ``sample_prob``
                     generated probability vectors (JSON arrays in CSV)
* ``sample_hard``    generated hard label (JSON scalar or array in CSV)

Cells are strings; the empty string is the missing marker and becomes NaN
on read. All operations treat frames as immutable and return new ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import (
    AnnokitError,
    EmptyAnnotationsError,
    InvalidMappingError,
    MixedTypesError,
)

SAMPLE_ID = "sample_id"
RE_PREFIX = "re_"
PROB_SUFFIX = "_prob"
SAMPLE_PROB = "sample_prob"
SAMPLE_HARD = "sample_hard"
IS_REANNOTATION = "is_reannotation"

RESERVED_COLUMNS = {SAMPLE_ID, SAMPLE_PROB, SAMPLE_HARD, IS_REANNOTATION}


def canonical_label(value) -> str:
    """Normalize a raw label value to its canonical string form.

    Strings pass through unchanged. Numeric values are formatted without
    spurious zeros (2.0 -> "2", 1.50 -> "1.5") so that the same label read
    from different file sources maps identically.
    """
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        f = float(value)
        if math.isnan(f) or math.isinf(f):
            raise TypeError(f"non-finite label value: {value!r}")
        if f.is_integer():
            return str(int(f))
        return repr(f)
    raise TypeError(f"label value of unsupported type {type(value).__name__}: {value!r}")


def is_missing(value) -> bool:
    """True for the empty-cell marker (NaN/None/empty string)."""
    if value is None:
        return True
    if isinstance(value, float) and math.isnan(value):
        return True
    if isinstance(value, str) and value == "":
        return True
    return value is pd.NA or value is pd.NaT


_TRUTHY = {"true", "1", "yes", "y"}


def parse_flag(value) -> bool:
    """Read a boolean cell; empty counts as False."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if is_missing(value):
        return False
    return str(value).strip().lower() in _TRUTHY


@dataclass(frozen=True)
class LabelMapping:
    """Ordered map from raw label string to class index 0..C-1."""

    entries: dict

    def __post_init__(self):
        indices = sorted(self.entries.values())
        if len(self.entries) < 2:
            raise InvalidMappingError(
                f"label mapping needs at least 2 classes, got {len(self.entries)}"
            )
        if indices != list(range(len(self.entries))):
            raise InvalidMappingError(
                f"class indices must be exactly 0..{len(self.entries) - 1}, got {indices}"
            )

    @classmethod
    def from_values(cls, values: Iterable) -> "LabelMapping":
        """Build a mapping from raw values, ordered lexicographically."""
        canon = sorted({canonical_label(v) for v in values})
        return cls({label: i for i, label in enumerate(canon)})

    @classmethod
    def from_dict(cls, d: dict) -> "LabelMapping":
        return cls({canonical_label(k): int(v) for k, v in d.items()})

    @property
    def num_classes(self) -> int:
        return len(self.entries)

    @property
    def classes(self) -> list:
        """Raw labels ordered by class index."""
        return [label for label, _ in sorted(self.entries.items(), key=lambda kv: kv[1])]

    def index_of(self, raw) -> int:
        return self.entries[canonical_label(raw)]

    def to_dict(self) -> dict:
        return dict(self.entries)


@dataclass
class ProjectConfig:
    """Project-level settings consumed across the pipeline."""

    annotators: list
    metric: str = "krippendorff_nominal"
    reliability_alpha: float = 0.5
    overlap_threshold: int = 0
    distribution: object = None
    seed: int = 0

    def __post_init__(self):
        if len(set(self.annotators)) != len(self.annotators):
            raise AnnokitError("annotator names must be unique")
        if not 0.0 <= self.reliability_alpha <= 1.0:
            raise AnnokitError(f"reliability alpha must be in [0,1], got {self.reliability_alpha}")
        if self.overlap_threshold < 0:
            raise AnnokitError("overlap threshold must be non-negative")


@dataclass(frozen=True)
class Violation:
    """One frame-invariant violation; data, not an exception."""

    kind: str
    sample_id: Optional[str] = None
    column: Optional[str] = None
    message: str = ""

    def __str__(self):
        where = ", ".join(
            p for p in (
                f"sample={self.sample_id}" if self.sample_id is not None else None,
                f"column={self.column}" if self.column is not None else None,
            ) if p
        )
        return f"{self.kind}({where}): {self.message}" if where else f"{self.kind}: {self.message}"


def annotator_columns(frame: pd.DataFrame, annotators: Sequence) -> list:
    """Annotator and re-annotation columns present in the frame."""
    cols = []
    for a in annotators:
        if a in frame.columns:
            cols.append(a)
        if RE_PREFIX + a in frame.columns:
            cols.append(RE_PREFIX + a)
    return cols


def detect_annotators(frame: pd.DataFrame, data_columns: Sequence = ()) -> list:
    """Infer annotator names from a compiled frame's columns.

    Every column is an annotator column unless it is reserved (sample_id,
    generated columns), a ``re_`` re-annotation column, or listed in
    ``data_columns``. Pass explicit names whenever the frame carries
    free-form data columns that would be misdetected.
    """
    skip = RESERVED_COLUMNS | set(data_columns)
    out = []
    for col in frame.columns:
        if col in skip or col.startswith(RE_PREFIX) or col.endswith(PROB_SUFFIX):
            continue
        out.append(col)
    return out


def infer_label_mapping(
    frame: pd.DataFrame,
    annotators: Sequence,
    multi_value: bool = False,
) -> LabelMapping:
    """Build the label mapping from the raw annotations themselves.

    Scans the listed annotator columns and their ``re_`` counterparts,
    collects the distinct raw values and assigns indices in lexicographic
    order. With ``multi_value`` each cell is split on commas first (used by
    the first/second-choice and multi-label generators).
    """
    values = set()
    for col in annotator_columns(frame, annotators):
        for cell in frame[col]:
            if is_missing(cell):
                continue
            try:
                canon = canonical_label(cell)
            except TypeError as exc:
                raise MixedTypesError(str(exc), column=col) from exc
            if multi_value:
                values.update(p.strip() for p in canon.split(",") if p.strip())
            else:
                values.add(canon)
    if not values:
        raise EmptyAnnotationsError(
            f"no non-null annotation cells among annotators {list(annotators)}"
        )
    return LabelMapping.from_values(values)


def validate_frame(frame: pd.DataFrame, annotators: Optional[Sequence] = None) -> list:
    """Check the frame invariants; returns violations (empty list = valid)."""
    violations = []
    if SAMPLE_ID not in frame.columns:
        violations.append(Violation("missing_sample_id_column", message="frame has no sample_id column"))
        return violations

    ids = frame[SAMPLE_ID]
    for idx, sid in ids.items():
        if is_missing(sid):
            violations.append(Violation("empty_sample_id", message=f"row {idx} has an empty sample_id"))
    # task files mark re-annotation duplicates: one unflagged row plus at
    # most one flagged row per sample is valid there
    if IS_REANNOTATION in frame.columns:
        flags = frame[IS_REANNOTATION].map(parse_flag)
        keys = pd.Series(list(zip(ids, flags)))[~ids.map(is_missing).values]
        counts = keys.value_counts()
        for (sid, flag), count in counts[counts > 1].items():
            violations.append(
                Violation(
                    "duplicate_sample_id",
                    sample_id=sid,
                    message=f"sample_id appears {count} times with is_reannotation={flag}",
                )
            )
    else:
        counts = ids[~ids.map(is_missing)].value_counts()
        for sid, count in counts[counts > 1].items():
            violations.append(
                Violation("duplicate_sample_id", sample_id=sid, message=f"sample_id appears {count} times")
            )

    re_cols = [c for c in frame.columns if c.startswith(RE_PREFIX) and not c.endswith(PROB_SUFFIX)]
    for re_col in re_cols:
        base = re_col[len(RE_PREFIX):]
        if base not in frame.columns:
            violations.append(
                Violation("missing_base_column", column=re_col, message=f"no base column {base!r}")
            )
            continue
        mask = ~frame[re_col].map(is_missing) & frame[base].map(is_missing)
        for sid in frame.loc[mask, SAMPLE_ID]:
            violations.append(
                Violation(
                    "orphan_reannotation",
                    sample_id=sid,
                    column=re_col,
                    message=f"{re_col} filled but {base} empty",
                )
            )
    return violations


def _serialize_cell(value):
    if is_missing(value):
        return value
    if isinstance(value, np.ndarray):
        return json.dumps([float(x) for x in value], separators=(",", ":"))
    if isinstance(value, (list, tuple)):
        return json.dumps([float(x) for x in value], separators=(",", ":"))
    if isinstance(value, (int, np.integer)):
        return json.dumps(int(value))
    return value


def _is_generated(col: str) -> bool:
    return col.endswith(PROB_SUFFIX) or col in (SAMPLE_PROB, SAMPLE_HARD)


def write_frame(frame: pd.DataFrame, dest) -> None:
    """Write a frame as UTF-8 CSV; generated columns become JSON cells.

    Output is byte-deterministic for a given frame.
    """
    out = frame.copy()
    for col in out.columns:
        if _is_generated(col):
            out[col] = out[col].map(_serialize_cell)
    out.to_csv(dest, index=False, na_rep="", encoding="utf-8", lineterminator="\n")


def read_frame(source) -> pd.DataFrame:
    """Read a CSV into a frame: all cells as strings, '' = missing,
    generated columns parsed back from their JSON cell form."""
    df = pd.read_csv(source, dtype=str, keep_default_na=False, na_values=[""])
    for col in df.columns:
        if col.endswith(PROB_SUFFIX):
            df[col] = df[col].map(
                lambda c: c if is_missing(c) else np.asarray(json.loads(c), dtype=float)
            )
        elif col == SAMPLE_HARD:
            df[col] = df[col].map(lambda c: c if is_missing(c) else json.loads(c))
    return df


def frame_to_csv_bytes(frame: pd.DataFrame) -> bytes:
    import io

    buf = io.StringIO()
    write_frame(frame, buf)
    return buf.getvalue().encode("utf-8")
