"""Embedded wind-direction contingency tables (16-point compass on both axes).

``X1`` is the column site and ``X2`` the row site of each printed table.

dataset1
    X1 Gwalior Fort, X2 Rao Circle (Mangaluru), 24 Dec 2024 - 7 Jan 2025.
dataset2
    X1 Marina Beach (Chennai), X2 Gwalior Fort, 22 Dec 2024 - 7 Jan 2025.
dataset3
    X1 Marina Beach, X2 Rao Circle, 24 Dec 2024 - 7 Jan 2025.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .inference import CountTable
from .io import parse_count_table

__all__ = ["DATASETS", "DatasetFixture", "load_dataset", "dataset_text"]

DATASETS = ("dataset1", "dataset2", "dataset3")

_PROVENANCE = {
    "dataset1": "X1 Gwalior Fort, X2 Rao Circle; 24 Dec 2024 to 7 Jan 2025",
    "dataset2": "X1 Marina Beach, X2 Gwalior Fort; 22 Dec 2024 to 7 Jan 2025",
    "dataset3": "X1 Marina Beach, X2 Rao Circle; 24 Dec 2024 to 7 Jan 2025",
}


@dataclass(frozen=True)
class DatasetFixture:
    name: str
    table: CountTable
    provenance: str


def dataset_text(name):
    if name not in DATASETS:
        raise KeyError(f"unknown dataset {name!r}; choose from {', '.join(DATASETS)}")
    return resources.files("torusfit").joinpath("data", f"{name}.csv").read_text()


def load_dataset(name):
    """Embedded 16x16 count table as a :class:`DatasetFixture`."""
    return DatasetFixture(name, parse_count_table(dataset_text(name), 16, 16), _PROVENANCE[name])
