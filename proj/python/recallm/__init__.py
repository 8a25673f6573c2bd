"""Temporal concept-graph memory for chat models.

The heavy lifting happens in the compiled ``_core`` module; this package turns
its JSON payloads into Python dictionaries.
"""

import json

from . import _core
from ._core import (
    ArgumentError,
    Error,
    concept_labels,
    dataset_sizes,
    format_percent,
    perfect_discriminator_accuracy,
    segment,
    stem,
    uncertainty_score,
)

__all__ = [
    "ArgumentError",
    "Error",
    "Memory",
    "bench_summary",
    "concept_labels",
    "dataset_sizes",
    "format_percent",
    "perfect_discriminator_accuracy",
    "segment",
    "stem",
    "uncertainty_score",
]

__version__ = "0.1.0"


class Memory:
    """A graph memory plus vector baseline with offline providers.

    Stores live in memory unless snapshot paths are given; ``overrides`` takes
    config assignments such as ``"revision.enabled=false"``.
    """

    def __init__(self, graph_path="", vector_path="", overrides=()):
        self._engine = _core.Engine(graph_path, vector_path, list(overrides))

    def ingest(self, text):
        return json.loads(self._engine.ingest(text))

    def ask(self, question, mode="graph"):
        return json.loads(self._engine.ask(question, mode))

    def stats(self):
        return json.loads(self._engine.stats())

    def export_graph(self):
        return json.loads(self._engine.export_graph())

    def save(self):
        self._engine.save()


def bench_summary(reps, checkpoints=(), revision=True):
    """Offline temporal benchmark; returns counters and evidence recall."""
    return json.loads(_core.bench_summary(reps, list(checkpoints), revision))
