"""Compile per-annotator files into one wide annotation frame.

Each input table carries sample_id, one label column (named after the
annotator or literally "label"), optional data columns and an optional
is_reannotation marker. Within a file the first occurrence of a sample is
the original annotation and the second (or the row flagged as
re-annotation) becomes the re_{annotator} value; a third occurrence is an
error. Data columns merge across files, first non-empty value wins.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass
from pathlib import Path, PurePosixPath
from typing import Optional, Sequence
from warnings import warn

import pandas as pd

from . import model
from .distribution import Allocation, allocation_tables
from .errors import (
    AnnokitError,
    AnnotatorCollisionError,
    ConflictingCellError,
    CorruptArchiveError,
    EmptyArchiveError,
    IgnoredEntryWarning,
    MissingSampleIdError,
    TripleAnnotationError,
    UnsupportedFormatError,
)

#: distribution artifact file stems that are not annotator files
NON_ANNOTATOR_STEMS = {"leftover"}


def compile_annotations(tables, renames: Optional[dict] = None) -> pd.DataFrame:
    """Merge (annotator, table) pairs into one wide frame.

    tables is an iterable of (name, DataFrame); renames maps raw column
    names to canonical ones and is applied to every table first. Output
    columns: sample_id, data columns (first appearance order), annotator
    columns (input order), then re_ columns for annotators with a second
    pass.
    """
    renames = renames or {}
    seen_names = set()
    rows = {}
    row_order = []
    data_cols = []
    ann_cols = []
    re_cols = []

    for name, table in tables:
        if name in seen_names:
            raise AnnotatorCollisionError(f"two input files map to annotator {name!r}")
        seen_names.add(name)
        if renames:
            table = table.rename(columns=renames)
        if model.SAMPLE_ID not in table.columns:
            raise MissingSampleIdError(f"file for {name!r} has no sample_id column")
        if name in table.columns:
            label_col = name
        elif "label" in table.columns:
            label_col = "label"
        else:
            raise AnnokitError(
                f"file for {name!r} has neither a {name!r} nor a 'label' column"
            )
        extra = [
            c
            for c in table.columns
            if c not in (model.SAMPLE_ID, label_col, model.IS_REANNOTATION)
        ]
        flags = (
            [model.parse_flag(v) for v in table[model.IS_REANNOTATION]]
            if model.IS_REANNOTATION in table.columns
            else [False] * len(table)
        )

        passes = {}
        for pos in range(len(table)):
            sid = table[model.SAMPLE_ID].iloc[pos]
            if model.is_missing(sid):
                raise MissingSampleIdError(
                    f"file for {name!r} has an empty sample_id in row {pos}"
                )
            if sid not in rows:
                rows[sid] = {}
                row_order.append(sid)
            row = rows[sid]
            for col in extra:
                value = table[col].iloc[pos]
                if model.is_missing(value):
                    continue
                if col not in data_cols:
                    data_cols.append(col)
                row.setdefault(col, value)
            label = table[label_col].iloc[pos]
            if model.is_missing(label):
                continue
            passes.setdefault(sid, []).append((flags[pos], label))

        if name not in ann_cols:
            ann_cols.append(name)
        re_col = model.RE_PREFIX + name
        for sid, entries in passes.items():
            if len(entries) > 2:
                raise TripleAnnotationError(
                    f"annotator {name!r} annotated sample {sid!r} {len(entries)} times"
                )
            # flagged rows sort behind unflagged ones, ties keep file order
            entries = sorted(entries, key=lambda e: e[0])
            rows[sid][name] = entries[0][1]
            if len(entries) == 2:
                if re_col not in re_cols:
                    re_cols.append(re_col)
                rows[sid][re_col] = entries[1][1]

    if not seen_names:
        raise EmptyArchiveError("no annotation tables to compile")

    columns = [model.SAMPLE_ID] + data_cols + ann_cols + re_cols
    records = []
    for sid in row_order:
        row = rows[sid]
        records.append([sid] + [row.get(c, None) for c in columns[1:]])
    return pd.DataFrame(records, columns=columns, dtype=object)


def concat_annotations(frames: Sequence[pd.DataFrame]) -> pd.DataFrame:
    """Union compiled frames by sample_id and column, first value wins.

    Two different non-empty values for the same cell raise
    ConflictingCellError; equal values merge silently.
    """
    rows = {}
    row_order = []
    columns = []
    for frame in frames:
        if model.SAMPLE_ID not in frame.columns:
            raise MissingSampleIdError("frame has no sample_id column")
        for col in frame.columns:
            if col != model.SAMPLE_ID and col not in columns:
                columns.append(col)
        for pos in range(len(frame)):
            sid = frame[model.SAMPLE_ID].iloc[pos]
            if model.is_missing(sid):
                raise MissingSampleIdError(f"empty sample_id in row {pos}")
            if sid not in rows:
                rows[sid] = {}
                row_order.append(sid)
            row = rows[sid]
            for col in frame.columns:
                if col == model.SAMPLE_ID:
                    continue
                value = frame[col].iloc[pos]
                if model.is_missing(value):
                    continue
                if col in row and not _cells_equal(row[col], value):
                    raise ConflictingCellError(
                        f"sample {sid!r} column {col!r} holds both "
                        f"{row[col]!r} and {value!r}"
                    )
                row.setdefault(col, value)
    records = []
    for sid in row_order:
        row = rows[sid]
        records.append([sid] + [row.get(c, None) for c in columns])
    return pd.DataFrame(records, columns=[model.SAMPLE_ID] + columns, dtype=object)


def _cells_equal(a, b) -> bool:
    try:
        import numpy as np

        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            return np.array_equal(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    except (TypeError, ValueError):
        return False
    return a == b


def unpack_archive(data) -> list:
    """Extract (annotator, frame) pairs from a ZIP of CSV files.

    Accepts bytes or a path. Directory nesting is flattened: the file stem
    names the annotator. Non-CSV members are skipped with a warning; an
    archive without any CSV is an error.
    """
    if isinstance(data, (str, Path)):
        data = Path(data).read_bytes()
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
        names = archive.namelist()
    except zipfile.BadZipFile as exc:
        raise CorruptArchiveError(f"not a readable ZIP archive: {exc}") from exc
    tables = []
    for member in names:
        if member.endswith("/"):
            continue
        path = PurePosixPath(member)
        if path.suffix.lower() != ".csv":
            warn(
                f"ignoring non-CSV archive member {member!r}",
                IgnoredEntryWarning,
                stacklevel=2,
            )
            continue
        if path.stem in NON_ANNOTATOR_STEMS:
            warn(
                f"ignoring distribution artifact {member!r}",
                IgnoredEntryWarning,
                stacklevel=2,
            )
            continue
        try:
            payload = archive.read(member)
        except zipfile.BadZipFile as exc:
            raise CorruptArchiveError(f"member {member!r} is corrupt: {exc}") from exc
        frame = model.read_frame(io.BytesIO(payload))
        tables.append((path.stem, frame))
    if not tables:
        raise EmptyArchiveError("archive contains no CSV files")
    return tables


def compile_archive(data, renames: Optional[dict] = None) -> pd.DataFrame:
    return compile_annotations(unpack_archive(data), renames=renames)


def make_zip_bytes(files: dict) -> bytes:
    """Deterministic ZIP: fixed timestamps, insertion order, deflate."""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as archive:
        for name, payload in files.items():
            info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            archive.writestr(info, payload)
    return buf.getvalue()


@dataclass
class ProjectBundle:
    """A ready-to-upload annotation project: task files plus manifest."""

    manifest: dict
    files: dict  # file name -> bytes

    def to_zip_bytes(self) -> bytes:
        payload = dict(self.files)
        payload["manifest.json"] = (
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n"
        ).encode()
        return make_zip_bytes(payload)

    def write(self, out_dir) -> list:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, payload in self.files.items():
            path = out_dir / name
            path.write_bytes(payload)
            written.append(path)
        manifest_path = out_dir / "manifest.json"
        manifest_path.write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n"
        )
        written.append(manifest_path)
        return written


def generate_project(
    frame: pd.DataFrame,
    alloc: Allocation,
    mapping: Optional[model.LabelMapping] = None,
    fmt: str = "teamware-like",
) -> ProjectBundle:
    """Render an allocation as an annotation-platform project bundle."""
    if fmt != "teamware-like":
        raise UnsupportedFormatError(f"unsupported project format {fmt!r}")
    files = {
        name: model.frame_to_csv_bytes(table)
        for name, table in allocation_tables(alloc, frame).items()
    }
    manifest = {
        "format": fmt,
        "version": 1,
        "seed": alloc.seed,
        "document_fields": [c for c in frame.columns if c != model.SAMPLE_ID],
        "annotators": {
            name: list(a.assigned_ids) for name, a in alloc.assignments.items()
        },
        "reannotations": {
            name: list(a.reannotate_ids) for name, a in alloc.assignments.items()
        },
    }
    if mapping is not None:
        manifest["label_schema"] = {
            "classes": mapping.classes,
            "mapping": mapping.to_dict(),
        }
    if alloc.leftover_ids:
        manifest["leftover"] = list(alloc.leftover_ids)
    return ProjectBundle(manifest=manifest, files=files)
