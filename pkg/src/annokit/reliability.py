"""Recursive annotator-reliability estimation over the agreement graph.

Each round recomputes, for every annotator i:

    inter_i = sum_j rel_j * a_ij / sum_j rel_j        over neighbours j
    g_i     = alpha * intra_i + (1 - alpha) * inter_i
    raw_i   = 1 + g_i
    rel     = raw * n / sum(raw)                      (mean forced to 1)

until the largest per-annotator change drops below the tolerance. The
alpha blend renormalizes per node: an annotator without intra data uses
pure inter-agreement, one without edges uses pure intra-agreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .agreement import AnnotatorGraph
from .errors import AnnokitError, NoSignalError, UnknownAnnotatorError


@dataclass
class ReliabilityConfig:
    alpha: float = 0.5
    tolerance: float = 1e-6
    max_iterations: int = 100

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise AnnokitError(f"alpha must be in [0,1], got {self.alpha}")
        if self.tolerance <= 0:
            raise AnnokitError("tolerance must be positive")
        if self.max_iterations < 1:
            raise AnnokitError("max_iterations must be >= 1")


@dataclass
class ReliabilityReport:
    reliability: dict
    iterations: int
    converged: bool
    graph: AnnotatorGraph
    #: one entry per iteration: {"mean": float, "max_delta": float}
    history: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "reliability": dict(self.reliability),
            "iterations": self.iterations,
            "converged": self.converged,
        }


def compute_reliability(
    graph: AnnotatorGraph,
    config: Optional[ReliabilityConfig] = None,
    initial: Optional[dict] = None,
) -> ReliabilityReport:
    """Iterate the reliability update to a fixed point.

    Every node needs at least one edge or an intra value (NoSignalError
    otherwise). Non-convergence within max_iterations is not an error: the
    last iterate is returned with converged=False. Reliabilities are
    written back into the graph nodes.
    """
    config = config or ReliabilityConfig()
    names = graph.annotators
    n = len(names)
    if n < 2:
        raise AnnokitError(f"reliability needs at least 2 annotators, got {n}")

    neighbors = {name: graph.neighbors(name) for name in names}
    intra = {name: graph.intra(name) for name in names}
    for name in names:
        if not neighbors[name] and intra[name] is None:
            raise NoSignalError(
                f"annotator {name!r} has neither agreement edges nor intra-annotator data"
            )

    if initial is not None:
        rel = np.array([float(initial[name]) for name in names])
    else:
        rel = np.array([graph.reliability(name) for name in names])

    alpha = config.alpha
    index = {name: i for i, name in enumerate(names)}
    history = []
    iterations = 0
    converged = False

    for iterations in range(1, config.max_iterations + 1):
        raw = np.empty(n)
        for i, name in enumerate(names):
            inter = None
            if neighbors[name]:
                weights = np.array([rel[index[j]] for j, _ in neighbors[name]])
                agreements = np.array([edge["agreement"] for _, edge in neighbors[name]])
                denom = weights.sum()
                if denom > 0:
                    inter = float(weights @ agreements) / float(denom)
            own = intra[name]
            if own is None and inter is None:
                g = 0.0  # no usable signal this round (all neighbour weights zero)
            elif own is None:
                g = inter
            elif inter is None:
                g = own
            else:
                g = alpha * own + (1.0 - alpha) * inter
            raw[i] = 1.0 + g

        total = raw.sum()
        assert total > 0, "recentred reliabilities summed to zero; agreement data degenerate"
        new_rel = raw * (n / total)
        max_delta = float(np.max(np.abs(new_rel - rel)))
        rel = new_rel
        history.append({"mean": float(rel.mean()), "max_delta": max_delta})
        if max_delta < config.tolerance:
            converged = True
            break

    reliability = {name: float(rel[index[name]]) for name in names}
    for name in names:
        graph.nodes[name]["reliability"] = reliability[name]
    return ReliabilityReport(
        reliability=reliability,
        iterations=iterations,
        converged=converged,
        graph=graph,
        history=history,
    )


def get_user_reliability(report: ReliabilityReport, annotator: str) -> float:
    if annotator not in report.reliability:
        raise UnknownAnnotatorError(f"unknown annotator {annotator!r}")
    return report.reliability[annotator]


def reliability_dict(report: ReliabilityReport) -> dict:
    return dict(report.reliability)
