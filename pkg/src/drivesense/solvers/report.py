from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..coverage import CoverageModel, Score, Selection, decimal_str


@dataclass
class SolveReport:
    algorithm: str
    selection: Selection
    score: Score
    evaluations: int
    wall_time: float
    extras: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_dict(self, include_time: bool = True) -> dict:
        out = {
            "algorithm": self.algorithm,
            "selection": list(self.selection.agent_ids),
            **self.score.to_dict(),
            "evaluations": self.evaluations,
            "extras": _jsonable(self.extras),
            "warnings": list(self.warnings),
        }
        if include_time:
            out["wall_time_s"] = repr(self.wall_time)
        return out


def _jsonable(value):
    if isinstance(value, Fraction):
        return decimal_str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (Score, Selection)):
        return value.to_dict() if isinstance(value, Score) else list(value.agent_ids)
    return value


def check_budget_k(model: CoverageModel, k: int) -> None:
    n = len(model.agent_ids)
    if k < 1:
        raise ValueError(f"sensor budget must be at least 1, got {k}")
    if k > n:
        raise ValueError(f"sensor budget {k} exceeds fleet size {n}")


def zero_score(model: CoverageModel) -> Score:
    return Score.from_slots([Fraction(0)] * model.n_slots)
