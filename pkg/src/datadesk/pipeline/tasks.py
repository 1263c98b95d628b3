"""Task lists: the ordered data-need / query-need pairs a question maps to."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DatadeskError

DATA = "data"
QUERY = "query"


@dataclass(frozen=True)
class Task:
    chi: str      # "data" | "query"
    kappa: str    # natural-language need
    ordinal: int  # 1-based position in the task list

    def __post_init__(self):
        if self.chi not in (DATA, QUERY):
            raise DatadeskError(f"task classification must be data/query, got {self.chi!r}")
        if not self.kappa or not self.kappa.strip():
            raise DatadeskError("task description must be non-empty")


@dataclass(frozen=True)
class TaskList:
    tasks: tuple[Task, ...]

    def __post_init__(self):
        for i, task in enumerate(self.tasks, start=1):
            if task.ordinal != i:
                raise DatadeskError(
                    f"task ordinals must be dense from 1; position {i} holds ordinal {task.ordinal}"
                )

    @staticmethod
    def from_pairs(pairs: list[tuple[str, str]]) -> "TaskList":
        return TaskList(tuple(Task(chi, kappa, i) for i, (chi, kappa) in enumerate(pairs, 1)))

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self):
        return len(self.tasks)
