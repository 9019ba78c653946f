"""Soft and hard label generation from raw annotation cells.

A GeneratorSpec fixes how one annotation cell becomes a probability
vector over the label classes:

  default  one label per cell, one-hot
  effi     one or two comma-separated choices; two choices weight the
           first 2/3 and the second 1/3
  topic    comma-separated label set, multi-hot (not a distribution)
  ordinal  one label on a numerically ordered scale, one-hot

Per-annotator vectors land in {annotator}_prob columns (re-annotations in
re_{annotator}_prob). Sample-level vectors are reliability-weighted means
with negative reliabilities clamped to zero; an annotator's re-annotation
pass is averaged into their own vector first so nobody votes twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from . import model
from .errors import (
    AllZeroWeightsError,
    AnnokitError,
    NoAnnotationsError,
    UnmappedValueError,
)

VARIANTS = ("default", "effi", "topic", "ordinal")

#: variants whose cells may hold several comma-separated labels
MULTI_VALUE_VARIANTS = ("effi", "topic")


@dataclass
class GeneratorSpec:
    annotators: list
    mapping: model.LabelMapping
    variant: str = "default"
    first_choice_weight: float = 2.0 / 3.0
    second_choice_weight: float = 1.0 / 3.0
    hard_threshold: float = 0.5

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise AnnokitError(
                f"unknown label generator {self.variant!r}; expected one of {', '.join(VARIANTS)}"
            )
        if self.variant == "effi":
            w1, w2 = self.first_choice_weight, self.second_choice_weight
            if not (w1 > w2 > 0 and abs(w1 + w2 - 1.0) < 1e-12):
                raise AnnokitError(
                    f"effi weights must satisfy w1 > w2 > 0 and w1 + w2 = 1, got ({w1}, {w2})"
                )
        if not 0.0 < self.hard_threshold < 1.0:
            raise AnnokitError(
                f"hard threshold must be in (0,1), got {self.hard_threshold}"
            )

    @property
    def num_classes(self) -> int:
        return self.mapping.num_classes

    @property
    def is_distribution(self) -> bool:
        """Whether generated vectors sum to 1 (topic multi-hots do not)."""
        return self.variant != "topic"


def from_annotations(
    frame: pd.DataFrame,
    annotators: Optional[Sequence[str]] = None,
    variant: str = "default",
    mapping: Optional[model.LabelMapping] = None,
    **kwargs,
) -> GeneratorSpec:
    """Build a GeneratorSpec by scanning the frame's annotation cells.

    The mapping is inferred lexicographically unless given; the ordinal
    variant orders numerically when every observed label parses as a
    number, so a 1..10 scale maps to indices 0..9.
    """
    if annotators is None:
        annotators = model.detect_annotators(frame)
    annotators = list(annotators)
    if mapping is None:
        multi = variant in MULTI_VALUE_VARIANTS
        mapping = model.infer_label_mapping(frame, annotators, multi_value=multi)
        if variant == "ordinal":
            classes = mapping.classes
            try:
                ordered = sorted(classes, key=float)
            except ValueError:
                ordered = classes
            mapping = model.LabelMapping({label: i for i, label in enumerate(ordered)})
    return GeneratorSpec(annotators=annotators, mapping=mapping, variant=variant, **kwargs)


def _cell_vector(spec: GeneratorSpec, raw, sample_id) -> np.ndarray:
    mapping = spec.mapping
    vec = np.zeros(spec.num_classes)
    if spec.variant in ("default", "ordinal"):
        vec[_index(mapping, raw, sample_id)] = 1.0
        return vec
    parts = [p.strip() for p in str(raw).split(",") if p.strip()]
    if not parts:
        raise UnmappedValueError(f"empty annotation cell in sample {sample_id!r}")
    if spec.variant == "effi":
        if len(parts) > 2:
            raise UnmappedValueError(
                f"effi cells take at most two choices, sample {sample_id!r} has "
                f"{len(parts)}: {raw!r}"
            )
        if len(parts) == 1:
            vec[_index(mapping, parts[0], sample_id)] = 1.0
        else:
            vec[_index(mapping, parts[0], sample_id)] = spec.first_choice_weight
            vec[_index(mapping, parts[1], sample_id)] += spec.second_choice_weight
        return vec
    for part in parts:  # topic
        vec[_index(mapping, part, sample_id)] = 1.0
    return vec


def _index(mapping: model.LabelMapping, raw, sample_id) -> int:
    try:
        return mapping.index_of(raw)
    except KeyError:
        raise UnmappedValueError(
            f"value {raw!r} in sample {sample_id!r} is not in the label mapping"
        ) from None


def annotation_prob_labels(frame: pd.DataFrame, spec: GeneratorSpec) -> pd.DataFrame:
    """Add {annotator}_prob and re_{annotator}_prob vector columns."""
    out = frame.copy()
    sample_ids = list(frame[model.SAMPLE_ID])
    columns = []
    for name in spec.annotators:
        if name in frame.columns:
            columns.append((name, name + model.PROB_SUFFIX))
        re_col = model.RE_PREFIX + name
        if re_col in frame.columns:
            columns.append((re_col, re_col + model.PROB_SUFFIX))
    for source, target in columns:
        vectors = []
        for sid, raw in zip(sample_ids, frame[source]):
            if model.is_missing(raw):
                vectors.append(None)
            else:
                vectors.append(_cell_vector(spec, raw, sid))
        out[target] = vectors
    return out


def _stacked_probs(frame: pd.DataFrame, spec: GeneratorSpec):
    """Per-annotator prob tensor with re-annotations averaged in.

    Returns (probs, present): probs has shape (annotators, rows, classes)
    with zeros where absent, present is the (annotators, rows) mask.
    """
    n_rows = len(frame)
    n_ann = len(spec.annotators)
    C = spec.num_classes
    probs = np.zeros((n_ann, n_rows, C))
    present = np.zeros((n_ann, n_rows), dtype=bool)
    for i, name in enumerate(spec.annotators):
        col = name + model.PROB_SUFFIX
        if col not in frame.columns:
            raise AnnokitError(
                f"column {col!r} is missing; generate annotation probabilities first"
            )
        re_col = model.RE_PREFIX + name + model.PROB_SUFFIX
        re_values = frame[re_col] if re_col in frame.columns else None
        for row, value in enumerate(frame[col]):
            if value is None or (isinstance(value, float) and math.isnan(value)):
                continue
            vec = np.asarray(value, dtype=float)
            if re_values is not None:
                re_vec = re_values.iloc[row]
                if re_vec is not None and not (
                    isinstance(re_vec, float) and math.isnan(re_vec)
                ):
                    vec = (vec + np.asarray(re_vec, dtype=float)) / 2.0
            probs[i, row] = vec
            present[i, row] = True
    return probs, present


def sample_prob_labels(
    frame: pd.DataFrame,
    spec: GeneratorSpec,
    reliabilities: Optional[dict] = None,
) -> pd.DataFrame:
    """Add the sample_prob column: reliability-weighted mean annotation vector.

    Weights are max(reliability, 0); absent reliabilities default to 1.
    Rows with no annotations raise NoAnnotationsError; rows whose present
    annotators all have zero weight raise AllZeroWeightsError.
    """
    probs, present = _stacked_probs(frame, spec)
    weights = np.array(
        [
            max((reliabilities or {}).get(name, 1.0), 0.0)
            for name in spec.annotators
        ]
    )
    w = present * weights[:, None]
    denom = w.sum(axis=0)
    missing = ~present.any(axis=0)
    if missing.any():
        row = int(np.argmax(missing))
        raise NoAnnotationsError(
            f"sample {frame[model.SAMPLE_ID].iloc[row]!r} has no annotations"
        )
    dead = denom <= 0
    if dead.any():
        row = int(np.argmax(dead))
        raise AllZeroWeightsError(
            f"all annotators of sample {frame[model.SAMPLE_ID].iloc[row]!r} "
            "have zero reliability weight"
        )
    numer = np.einsum("ar,arc->rc", w, probs)
    combined = numer / denom[:, None]
    out = frame.copy()
    out[model.SAMPLE_PROB] = list(combined)
    return out


def sample_hard_labels(
    frame: pd.DataFrame, spec: GeneratorSpec, mode: str = "argmax"
) -> pd.DataFrame:
    """Add the sample_hard column.

    argmax takes the top class of sample_prob (ties break to the lowest
    index). majority votes each annotator's own argmax and takes the mode,
    again breaking ties low. The topic variant instead lists every class
    whose pooled probability reaches the threshold.
    """
    out = frame.copy()
    if spec.variant == "topic":
        if model.SAMPLE_PROB not in frame.columns:
            raise AnnokitError("sample_hard for topics needs sample_prob; generate it first")
        out[model.SAMPLE_HARD] = [
            [int(k) for k in np.flatnonzero(np.asarray(vec) >= spec.hard_threshold)]
            for vec in frame[model.SAMPLE_PROB]
        ]
        return out
    if mode == "argmax":
        if model.SAMPLE_PROB not in frame.columns:
            raise AnnokitError("argmax hard labels need sample_prob; generate it first")
        out[model.SAMPLE_HARD] = [
            int(np.argmax(np.asarray(vec))) for vec in frame[model.SAMPLE_PROB]
        ]
        return out
    if mode != "majority":
        raise AnnokitError(f"unknown hard-label mode {mode!r}")
    probs, present = _stacked_probs(frame, spec)
    C = spec.num_classes
    hard = []
    for row in range(len(frame)):
        idx = np.flatnonzero(present[:, row])
        if idx.size == 0:
            raise NoAnnotationsError(
                f"sample {frame[model.SAMPLE_ID].iloc[row]!r} has no annotations"
            )
        votes = [int(np.argmax(probs[i, row])) for i in idx]
        hard.append(int(np.bincount(votes, minlength=C).argmax()))
    out[model.SAMPLE_HARD] = hard
    return out
