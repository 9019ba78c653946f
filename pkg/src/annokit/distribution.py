"""Resource solving and sample distribution over a ring of annotators.

The capacity identity ties the planning quantities together:

    N = n * m * (1 - d/2),   m = t * rate / (1 + r)

where n annotators each work t hours at `rate` annotations per hour, a
proportion d of each annotator's load is double-annotated with ring
neighbours, and a proportion r is spent re-annotating their own samples.
Exactly one of {n, t, rate, N} may be unknown; the solver completes it in
closed form.

Distribution carves the input frame in order: one shared block per ring
pair first, then each annotator's single block. Per annotator the distinct
load is exactly floor(m): each pair block holds floor(d*m / (2*span))
samples and singles make up the remainder. The seed only drives the choice
of re-annotated samples.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from . import model
from .errors import (
    AnnokitError,
    DegenerateRingWarning,
    InfeasibleRedistributionError,
    InsufficientSamplesError,
    NonPositiveSolutionError,
    OverdeterminedError,
    UnderdeterminedError,
)

#: column added to exported task files marking duplicate re-annotation rows
LABEL_COLUMN = "label"

_SOLVABLE = ("annotators", "time", "rate", "samples")


@dataclass
class ResourceSpec:
    """The planning equation's quantities; unknowns are None."""

    annotators: Optional[float] = None
    time: Optional[float] = None
    rate: Optional[float] = None
    samples: Optional[float] = None
    double: float = 0.0
    reannotation: float = 0.0

    def __post_init__(self):
        for name in _SOLVABLE:
            value = getattr(self, name)
            if value is None:
                continue
            setattr(self, name, float(value))
            if value <= 0:
                raise AnnokitError(f"{name} must be positive, got {value}")
        self.double = float(self.double)
        self.reannotation = float(self.reannotation)
        if not 0.0 <= self.double <= 1.0:
            raise AnnokitError(f"double proportion must be in [0,1], got {self.double}")
        if not 0.0 <= self.reannotation < 1.0:
            raise AnnokitError(
                f"re-annotation proportion must be in [0,1), got {self.reannotation}"
            )

    def unknowns(self) -> list:
        return [name for name in _SOLVABLE if getattr(self, name) is None]

    @property
    def load(self) -> float:
        """Distinct-sample load m per annotator (excludes re-annotations)."""
        if self.time is None or self.rate is None:
            raise AnnokitError("load requires time and rate to be known")
        return self.time * self.rate / (1.0 + self.reannotation)

    @property
    def n(self) -> int:
        if self.annotators is None:
            raise AnnokitError("annotator count is unknown; solve the spec first")
        return int(math.floor(self.annotators))

    def to_json(self) -> dict:
        out = {
            "annotators": self.annotators,
            "time": self.time,
            "rate": self.rate,
            "samples": self.samples,
            "double": self.double,
            "re": self.reannotation,
        }
        if self.annotators is not None:
            out["annotators_floor"] = int(math.floor(self.annotators))
        if self.samples is not None:
            out["samples_floor"] = int(math.floor(self.samples))
        if self.time is not None and self.rate is not None:
            out["load"] = self.load
            out["load_floor"] = int(math.floor(self.load))
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ResourceSpec":
        return cls(
            annotators=data.get("annotators"),
            time=data.get("time"),
            rate=data.get("rate"),
            samples=data.get("samples"),
            double=data.get("double", 0.0),
            reannotation=data.get("re", data.get("reannotation", 0.0)),
        )


def solve_resources(spec: ResourceSpec) -> ResourceSpec:
    """Complete the spec via the capacity identity.

    Exactly one unknown is solved in closed form. A fully specified spec is
    checked for consistency: the stated sample count may deviate from the
    identity by at most max(1, n) to absorb rounding in the inputs.
    """
    unknowns = spec.unknowns()
    factor = 1.0 - spec.double / 2.0
    if len(unknowns) > 1:
        raise UnderdeterminedError(
            f"cannot solve for more than one unknown, missing: {', '.join(unknowns)}"
        )
    if not unknowns:
        exact = spec.annotators * spec.load * factor
        slack = max(1.0, spec.annotators)
        if abs(spec.samples - exact) > slack:
            raise OverdeterminedError(
                f"stated sample count {spec.samples} is inconsistent with the "
                f"capacity identity ({exact:.3f} expected, tolerance {slack:.1f})"
            )
        return replace(spec)

    unknown = unknowns[0]
    if unknown == "samples":
        value = spec.annotators * spec.load * factor
        solved = replace(spec, samples=value)
    elif unknown == "annotators":
        value = spec.samples * (1.0 + spec.reannotation) / (spec.time * spec.rate * factor)
        solved = replace(spec, annotators=value)
    elif unknown == "time":
        value = spec.samples * (1.0 + spec.reannotation) / (
            spec.annotators * spec.rate * factor
        )
        solved = replace(spec, time=value)
    else:
        value = spec.samples * (1.0 + spec.reannotation) / (
            spec.annotators * spec.time * factor
        )
        solved = replace(spec, rate=value)

    if not math.isfinite(value) or value <= 0:
        raise NonPositiveSolutionError(
            f"solving for {unknown} yields non-positive value {value}"
        )
    return solved


@dataclass
class AnnotatorAssignment:
    #: samples annotated only by this annotator, in carve order
    single_ids: list = field(default_factory=list)
    #: (sample_id, partner annotator) pairs, in carve order
    double_ids: list = field(default_factory=list)
    #: subset of assigned ids flagged for a second pass by the same annotator
    reannotate_ids: list = field(default_factory=list)

    @property
    def assigned_ids(self) -> list:
        return [sid for sid, _ in self.double_ids] + list(self.single_ids)

    @property
    def annotation_count(self) -> int:
        """Total annotation actions including re-annotations."""
        return len(self.single_ids) + len(self.double_ids) + len(self.reannotate_ids)


@dataclass
class Allocation:
    assignments: dict  # annotator name -> AnnotatorAssignment
    leftover_ids: list
    seed: int

    @property
    def annotators(self) -> list:
        return list(self.assignments)

    def distinct_ids(self) -> list:
        seen = {}
        for assignment in self.assignments.values():
            for sid in assignment.assigned_ids:
                seen[sid] = None
        return list(seen)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "annotators": {
                name: {
                    "single_ids": list(a.single_ids),
                    "double_ids": [[sid, partner] for sid, partner in a.double_ids],
                    "reannotate_ids": list(a.reannotate_ids),
                }
                for name, a in self.assignments.items()
            },
            "leftover_ids": list(self.leftover_ids),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Allocation":
        assignments = {}
        for name, entry in data["annotators"].items():
            assignments[name] = AnnotatorAssignment(
                single_ids=list(entry["single_ids"]),
                double_ids=[(sid, partner) for sid, partner in entry["double_ids"]],
                reannotate_ids=list(entry["reannotate_ids"]),
            )
        return cls(
            assignments=assignments,
            leftover_ids=list(data["leftover_ids"]),
            seed=data["seed"],
        )


def default_annotator_names(n: int) -> list:
    return [f"a{i + 1}" for i in range(n)]


def _ring_pairs(n: int, span: int) -> list:
    """Distinct unordered ring pairs (i, i+j mod n) for j = 1..span."""
    pairs = []
    seen = set()
    for j in range(1, span + 1):
        for i in range(n):
            key = frozenset((i, (i + j) % n))
            if len(key) < 2 or key in seen:
                continue
            seen.add(key)
            pairs.append((i, (i + j) % n))
    return pairs


def distribute(
    frame: pd.DataFrame,
    spec: ResourceSpec,
    seed: int = 0,
    annotator_names: Optional[Sequence[str]] = None,
    ring_span: int = 1,
) -> Allocation:
    """Assign the frame's samples to annotators on a ring.

    The frame is consumed in order: pair blocks first (one per ring pair,
    floor(d*m / (2*span)) samples each), then each annotator's singles so
    that every annotator's distinct load is exactly floor(m). Remaining
    rows become the leftover pool. floor(r*m) of each annotator's samples
    are flagged for re-annotation, chosen uniformly under the seed.
    """
    solved = solve_resources(spec)
    n = solved.n
    if n < 2:
        raise AnnokitError(f"distribution needs at least 2 annotators, got {n}")
    if ring_span < 1 or ring_span > n // 2:
        raise AnnokitError(
            f"ring span must be in [1, n//2] = [1, {n // 2}], got {ring_span}"
        )
    names = list(annotator_names) if annotator_names else default_annotator_names(n)
    if len(names) != n:
        raise AnnokitError(f"expected {n} annotator names, got {len(names)}")
    if len(set(names)) != len(names):
        raise AnnokitError("annotator names must be unique")

    m = solved.load
    load = int(math.floor(m))
    block = int(math.floor(solved.double * m / (2 * ring_span)))
    pairs = _ring_pairs(n, ring_span)
    if solved.double > 0 and n == 2:
        warnings.warn(
            "ring of 2 annotators collapses both neighbour pairs into one; "
            "shared volume is halved and the capacity identity overestimates "
            "coverage",
            DegenerateRingWarning,
            stacklevel=2,
        )

    degree = {i: 0 for i in range(n)}
    for i, j in pairs:
        degree[i] += 1
        degree[j] += 1
    singles = {i: load - degree[i] * block for i in range(n)}
    needed = len(pairs) * block + sum(singles.values())

    ids = list(frame[model.SAMPLE_ID])
    if len(ids) < needed:
        raise InsufficientSamplesError(
            f"distribution needs {needed} samples, frame has {len(ids)}"
        )

    assignments = {name: AnnotatorAssignment() for name in names}
    cursor = 0
    for i, j in pairs:
        chunk = ids[cursor : cursor + block]
        cursor += block
        for sid in chunk:
            assignments[names[i]].double_ids.append((sid, names[j]))
            assignments[names[j]].double_ids.append((sid, names[i]))
    for i in range(n):
        chunk = ids[cursor : cursor + singles[i]]
        cursor += singles[i]
        assignments[names[i]].single_ids.extend(chunk)
    leftover = ids[cursor:]

    rng = np.random.default_rng(seed)
    re_count = int(math.floor(solved.reannotation * m))
    for name in names:
        assigned = assignments[name].assigned_ids
        if re_count > len(assigned):
            raise InsufficientSamplesError(
                f"annotator {name!r} has {len(assigned)} samples but "
                f"{re_count} re-annotations are required"
            )
        if re_count:
            picked = rng.choice(len(assigned), size=re_count, replace=False)
            assignments[name].reannotate_ids = [assigned[k] for k in sorted(picked)]

    return Allocation(assignments=assignments, leftover_ids=leftover, seed=seed)


def redistribute(
    frame: pd.DataFrame,
    spec: ResourceSpec,
    seed: int = 0,
    annotator_names: Optional[Sequence[str]] = None,
    data_columns: Sequence[str] = (),
) -> Allocation:
    """Hand leftover or unfinished samples back out without repeats.

    Every row of the frame is assigned to an annotator who has not yet
    annotated it (judged by non-empty first-pass cells), walking a
    seed-shuffled annotator order round-robin. Capacity is floor(m) new
    samples per annotator. Samples that cannot be placed are collected and
    reported together in InfeasibleRedistributionError.
    """
    if annotator_names:
        names = list(annotator_names)
    else:
        names = model.detect_annotators(frame, data_columns=data_columns)
    if len(names) < 2:
        raise AnnokitError(f"redistribution needs at least 2 annotators, got {len(names)}")

    solved = solve_resources(spec)
    capacity = int(math.floor(solved.load))

    prior = {}
    for name in names:
        if name not in frame.columns:
            continue
        for sid, value in zip(frame[model.SAMPLE_ID], frame[name]):
            if not model.is_missing(value):
                prior.setdefault(sid, set()).add(name)

    rng = np.random.default_rng(seed)
    order = [names[k] for k in rng.permutation(len(names))]
    loads = {name: 0 for name in names}
    assignments = {name: AnnotatorAssignment() for name in names}
    stuck = []
    pointer = 0
    n = len(order)
    for sid in frame[model.SAMPLE_ID]:
        placed = False
        for step in range(n):
            cand = order[(pointer + step) % n]
            if cand in prior.get(sid, ()) or loads[cand] >= capacity:
                continue
            assignments[cand].single_ids.append(sid)
            loads[cand] += 1
            pointer = (pointer + step + 1) % n
            placed = True
            break
        if not placed:
            stuck.append(sid)
    if stuck:
        raise InfeasibleRedistributionError(
            f"{len(stuck)} samples could not be reassigned without repeats",
            stuck_samples=stuck,
        )
    return Allocation(assignments=assignments, leftover_ids=[], seed=seed)


def allocation_tables(alloc: Allocation, frame: pd.DataFrame) -> dict:
    """Per-annotator task frames plus the leftover frame.

    Each annotator file holds their assigned rows (frame order of
    assignment), an empty label column, and an is_reannotation marker;
    flagged samples appear a second time at the end with the marker set.
    Keys are file names: {annotator}.csv and leftover.csv.
    """
    by_id = {}
    for row_idx, sid in enumerate(frame[model.SAMPLE_ID]):
        by_id.setdefault(sid, row_idx)
    data_columns = [c for c in frame.columns if c != model.SAMPLE_ID]

    def rows_for(ids, flag):
        take = [by_id[sid] for sid in ids]
        sub = frame.iloc[take].copy().reset_index(drop=True)
        sub[LABEL_COLUMN] = ""
        sub[model.IS_REANNOTATION] = flag
        return sub

    tables = {}
    for name, assignment in alloc.assignments.items():
        first = rows_for(assignment.assigned_ids, False)
        parts = [first]
        if assignment.reannotate_ids:
            parts.append(rows_for(assignment.reannotate_ids, True))
        table = pd.concat(parts, ignore_index=True)
        order = [model.SAMPLE_ID] + data_columns + [LABEL_COLUMN, model.IS_REANNOTATION]
        tables[f"{name}.csv"] = table[order]
    leftover = frame[frame[model.SAMPLE_ID].isin(set(alloc.leftover_ids))]
    tables["leftover.csv"] = leftover.reset_index(drop=True)
    return tables


def allocation_files(
    alloc: Allocation, frame: pd.DataFrame, solved: ResourceSpec
) -> dict:
    """All distribution outputs as name -> bytes, shared by CLI and service."""
    files = {}
    for name, table in allocation_tables(alloc, frame).items():
        files[name] = model.frame_to_csv_bytes(table)
    files["spec.json"] = (
        json.dumps(solved.to_json(), indent=2, sort_keys=True) + "\n"
    ).encode()
    files["allocation.json"] = (
        json.dumps(alloc.to_json(), indent=2, sort_keys=True) + "\n"
    ).encode()
    return files
