"""Ordered weighted averaging of scenario costs."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple, Sequence

from .errors import SchemaError
from .model import format_number, to_fraction


@dataclass(frozen=True)
class OwaWeights:
    """Weight vector ``v``; ``v[0]`` multiplies the largest cost."""

    v: tuple[Fraction, ...]

    def __init__(self, v: Sequence[Any]):
        vals = tuple(to_fraction(x) for x in v)
        if not vals:
            raise ValueError("OWA weights need at least one entry")
        if any(x < 0 or x > 1 for x in vals):
            raise ValueError(f"OWA weights must lie in [0, 1], got {[str(x) for x in vals]}")
        if sum(vals) != 1:
            raise ValueError(f"OWA weights must sum to 1, got {sum(vals)}")
        object.__setattr__(self, "v", vals)

    @property
    def k(self) -> int:
        return len(self.v)

    def __len__(self) -> int:
        return len(self.v)

    def __getitem__(self, i: int) -> Fraction:
        return self.v[i]

    def is_nonincreasing(self) -> bool:
        return all(a >= b for a, b in zip(self.v, self.v[1:]))

    def first_positive(self) -> int:
        """0-based position of the first nonzero weight."""
        return next(i for i, x in enumerate(self.v) if x > 0)


def owa_value(v: OwaWeights, f: Sequence[Any]) -> Fraction:
    if len(f) != len(v):
        raise ValueError(f"cost vector has length {len(f)}, weights have length {len(v)}")
    ordered = sorted(f, reverse=True)
    return sum((w * x for w, x in zip(v.v, ordered)), Fraction(0))


def preset(kind: str, k: int, *, q: int | None = None, alpha: Any = None) -> OwaWeights:
    """Weights of the classical criteria.

    ``kind`` is one of maximum, minimum, average, median, quantile (needs
    ``q`` in 1..k) or hurwicz (needs ``alpha`` in [0, 1]).
    """
    if k < 1:
        raise ValueError("K must be at least 1")
    zero, one = Fraction(0), Fraction(1)

    def unit(pos: int) -> OwaWeights:
        v = [zero] * k
        v[pos] = one
        return OwaWeights(v)

    if kind in ("maximum", "max"):
        return unit(0)
    if kind in ("minimum", "min"):
        return unit(k - 1)
    if kind == "average":
        return OwaWeights([Fraction(1, k)] * k)
    if kind == "median":
        return unit(k // 2)
    if kind == "quantile":
        if q is None or not 1 <= q <= k:
            raise ValueError(f"quantile index must be in 1..{k}, got {q}")
        return unit(q - 1)
    if kind == "hurwicz":
        if alpha is None:
            raise ValueError("hurwicz preset needs alpha")
        a = to_fraction(alpha)
        if not 0 <= a <= 1:
            raise ValueError(f"alpha must be in [0, 1], got {a}")
        v = [zero] * k
        v[0] += a
        v[k - 1] += one - a
        return OwaWeights(v)
    raise ValueError(f"unknown OWA preset {kind!r}")


class DeviationWeights(NamedTuple):
    values: tuple[Fraction, ...]
    all_nonnegative: bool


def deviation_weights(v: OwaWeights) -> DeviationWeights:
    """Successive differences ``v[i] - v[i+1]``, last entry ``v[-1]``."""
    vals = tuple(a - b for a, b in zip(v.v, v.v[1:])) + (v.v[-1],)
    return DeviationWeights(vals, all(x >= 0 for x in vals))


def theta_k(f: Sequence[Any], k: int) -> Fraction:
    """Sum of the ``k`` largest entries of ``f`` (``k`` is 1-based)."""
    if not 1 <= k <= len(f):
        raise ValueError(f"k must be in 1..{len(f)}, got {k}")
    return sum(sorted((to_fraction(x) for x in f), reverse=True)[:k], Fraction(0))


def parse_owa(doc: dict | str, k: int) -> OwaWeights:
    """Read ``{"v": [...]}`` or ``{"preset": ...}`` (with ``k``/``alpha``)."""
    if isinstance(doc, str):
        doc = json.loads(doc, parse_float=Fraction)
    if not isinstance(doc, dict):
        raise SchemaError("OWA document must be a JSON object")
    if "v" in doc:
        weights = OwaWeights(doc["v"])
        if len(weights) != k:
            raise SchemaError(f"OWA vector has {len(weights)} entries, instance has K={k}")
        return weights
    if "preset" in doc:
        return preset(doc["preset"], k, q=doc.get("k"), alpha=doc.get("alpha"))
    raise SchemaError('OWA document needs "v" or "preset"')


def owa_to_dict(v: OwaWeights) -> dict:
    return {"v": [format_number(x) for x in v.v]}
