"""Weighted spatio-temporal coverage of an agent selection.

Each agent's per-slot visited cells are packed into Python ints used as
bitsets over the row-major cell universe. A selection's value in one slot is
the weighted popcount of the OR of its members' masks, so a cell visited by
several selected agents in the same slot counts once; the cumulative value
sums those slot values over the window.

Weights are exact rationals. Internally they are scaled by the least common
denominator to integers, so scores compare exactly.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, reduce
from typing import Iterable, Mapping, Optional, Sequence, Tuple

from .errors import UnknownAgentError
from .geo_grid import GridSpec, WeightGrid
from .trajectory import CoverageSignature, TimeSlotting


@dataclass(frozen=True)
class Selection:
    agent_ids: tuple

    def __post_init__(self):
        ids = tuple(self.agent_ids)
        object.__setattr__(self, "agent_ids", ids)
        if len(set(ids)) != len(ids):
            dupes = sorted(a for a, n in Counter(ids).items() if n > 1)
            raise ValueError(f"duplicate agents in selection: {dupes}")

    def __len__(self):
        return len(self.agent_ids)

    def __iter__(self):
        return iter(self.agent_ids)

    @property
    def key(self) -> tuple:
        """Sorted ids; the final tie-break key."""
        return tuple(sorted(self.agent_ids))


@dataclass(frozen=True)
class Score:
    ccv: Fraction
    per_slot: tuple
    min_slot: Fraction

    @classmethod
    def from_slots(cls, per_slot: Iterable[Fraction]) -> "Score":
        per_slot = tuple(per_slot)
        if not per_slot:
            raise ValueError("a score needs at least one slot")
        return cls(sum(per_slot, Fraction(0)), per_slot, min(per_slot))

    def to_dict(self) -> dict:
        return {
            "ccv": decimal_str(self.ccv),
            "per_slot": [decimal_str(v) for v in self.per_slot],
            "min_slot": decimal_str(self.min_slot),
        }


def decimal_str(value) -> str:
    """Exact decimal rendering of a rational, or ``p/q`` when it does not terminate."""
    f = Fraction(value)
    den = f.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{f.numerator}/{f.denominator}"
    places = max(twos, fives)
    if places == 0:
        return str(f.numerator)
    scaled = abs(f.numerator) * 10**places // f.denominator
    sign = "-" if f < 0 else ""
    digits = str(scaled).rjust(places + 1, "0")
    text = f"{digits[:-places]}.{digits[-places:]}".rstrip("0").rstrip(".")
    return sign + text


def compare(a, b) -> int:
    """Order two ``(Selection, Score)`` candidates; positive when ``a`` is better.

    Higher cumulative value wins, then higher minimum slot value, then the
    lexicographically smaller sorted id list.
    """
    sel_a, score_a = a
    sel_b, score_b = b
    if len(score_a.per_slot) != len(score_b.per_slot):
        raise ValueError(
            f"scores cover different slot counts ({len(score_a.per_slot)} vs {len(score_b.per_slot)})"
        )
    if score_a.ccv != score_b.ccv:
        return 1 if score_a.ccv > score_b.ccv else -1
    if score_a.min_slot != score_b.min_slot:
        return 1 if score_a.min_slot > score_b.min_slot else -1
    ka, kb = sel_a.key, sel_b.key
    if ka == kb:
        return 0
    return 1 if ka < kb else -1


rank_key = cmp_to_key(compare)


def best_of(candidates: Iterable) -> Tuple[Selection, Score]:
    return max(candidates, key=rank_key)


class CoverageModel:
    """Bitset evaluator over a fixed fleet and weight grid.

    Agents are held in sorted id order; solvers address them by position in
    :attr:`agent_ids`. ``evaluations`` counts full selection evaluations.
    """

    def __init__(self, signatures: Mapping[str, CoverageSignature], weights: WeightGrid,
                 n_slots: Optional[int] = None):
        self.weights = weights
        self.grid: GridSpec = weights.grid
        self.agent_ids: tuple = tuple(sorted(signatures))
        self.index = {a: i for i, a in enumerate(self.agent_ids)}
        lengths = {signatures[a].n_slots for a in self.agent_ids}
        if n_slots is None:
            if len(lengths) > 1:
                raise ValueError(f"signatures disagree on slot count: {sorted(lengths)}")
            n_slots = lengths.pop() if lengths else 0
        elif lengths - {n_slots}:
            raise ValueError(f"signatures have slot counts {sorted(lengths)}, expected {n_slots}")
        self.n_slots = n_slots
        self.signatures = signatures
        self.masks = [self._pack(signatures[a]) for a in self.agent_ids]
        self._set_weights(weights)
        self.evaluations = 0

    def _pack(self, sig: CoverageSignature) -> tuple:
        cols, rows = self.grid.cols, self.grid.rows
        out = []
        for cells in sig.visited:
            m = 0
            for r, c in cells:
                if not (0 <= r < rows and 0 <= c < cols):
                    raise IndexError(f"agent {sig.agent_id!r} visits ({r}, {c}) outside the grid")
                m |= 1 << (r * cols + c)
            out.append(m)
        return tuple(out)

    def _set_weights(self, weights: WeightGrid) -> None:
        flat = [w for row in weights.weights for w in row]
        self.scale = math.lcm(*(w.denominator for w in flat)) if flat else 1
        ints = [int(w * self.scale) for w in flat]
        # Most cells share one weight; store it as a base and correct the rest.
        self.base = Counter(ints).most_common(1)[0][0] if ints else 0
        corrections = {}
        for pos, w in enumerate(ints):
            if w != self.base:
                corrections[w - self.base] = corrections.get(w - self.base, 0) | (1 << pos)
        self.corrections = sorted(corrections.items())

    def with_weights(self, weights: WeightGrid) -> "CoverageModel":
        """Same fleet re-weighted (e.g. the hotspot-masked grid)."""
        if weights.grid != self.grid:
            raise ValueError("weight grid belongs to a different spatial grid")
        clone = object.__new__(CoverageModel)
        clone.__dict__.update(self.__dict__)
        clone.weights = weights
        clone._set_weights(weights)
        clone.evaluations = 0
        return clone

    def value(self, mask: int) -> int:
        """Scaled weighted popcount of one slot mask."""
        total = self.base * mask.bit_count()
        for delta, cells in self.corrections:
            total += delta * (mask & cells).bit_count()
        return total

    def union(self, indices: Iterable[int]) -> tuple:
        zero = (0,) * self.n_slots
        return reduce(lambda acc, i: tuple(a | b for a, b in zip(acc, self.masks[i])), indices, zero)

    def slot_values(self, indices: Iterable[int]) -> tuple:
        self.evaluations += 1
        return tuple(self.value(m) for m in self.union(indices))

    def to_score(self, values: Sequence[int]) -> Score:
        s = self.scale
        return Score.from_slots(Fraction(v, s) for v in values)

    def resolve(self, selection) -> tuple:
        ids = selection.agent_ids if isinstance(selection, Selection) else tuple(selection)
        try:
            return tuple(self.index[a] for a in ids)
        except KeyError as exc:
            raise UnknownAgentError(exc.args[0]) from None

    def selection(self, indices: Iterable[int]) -> Selection:
        return Selection(tuple(self.agent_ids[i] for i in sorted(indices)))

    def score(self, selection) -> Score:
        return self.to_score(self.slot_values(self.resolve(selection)))

    def agent_masks(self, agent_id: str) -> tuple:
        try:
            return self.masks[self.index[agent_id]]
        except KeyError:
            raise UnknownAgentError(agent_id) from None


def slot_coverage(sel, signatures: Mapping[str, CoverageSignature], weights: WeightGrid, k: int) -> Fraction:
    """Weighted size of the union of the selection's visited cells in slot ``k``."""
    model = CoverageModel({a: signatures[a] for a in _checked(sel, signatures)}, weights)
    if not 0 <= k < model.n_slots:
        raise IndexError(f"slot {k} outside 0..{model.n_slots - 1}")
    return Fraction(model.value(model.union(range(len(model.agent_ids)))[k]), model.scale)


def ccv(sel, signatures: Mapping[str, CoverageSignature], weights: WeightGrid,
        slotting: Optional[TimeSlotting] = None) -> Score:
    """Per-slot values, their sum and their minimum for one selection."""
    ids = _checked(sel, signatures)
    n_slots = slotting.n_slots if slotting is not None else None
    if n_slots is None and not ids:
        raise ValueError("cannot infer slot count for an empty selection without a slotting")
    model = CoverageModel({a: signatures[a] for a in ids}, weights, n_slots)
    return model.score(ids)


def _checked(sel, signatures) -> tuple:
    ids = Selection(sel.agent_ids if isinstance(sel, Selection) else tuple(sel)).agent_ids
    for a in ids:
        if a not in signatures:
            raise UnknownAgentError(a)
    return ids
