"""Affine integer expressions over named symbols.

Map bounds such as ``x - p`` or ``x1 + p`` stay symbolic until a target is
bound to concrete grids, so desugaring rules can be checked exactly on
symbolic extents.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

AffineLike = Union["Affine", int, str]


@dataclass(frozen=True)
class Affine:
    """const + sum(coef * symbol), with symbols kept in sorted order."""

    terms: tuple[tuple[str, int], ...]
    const: int

    @staticmethod
    def of(value: AffineLike) -> "Affine":
        if isinstance(value, Affine):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not an affine value")
        if isinstance(value, int):
            return Affine((), value)
        if isinstance(value, str):
            return Affine(((value, 1),), 0)
        raise TypeError(f"cannot build affine expression from {value!r}")

    @staticmethod
    def _make(coeffs: dict[str, int], const: int) -> "Affine":
        terms = tuple(sorted((s, c) for s, c in coeffs.items() if c != 0))
        return Affine(terms, const)

    def _coeffs(self) -> dict[str, int]:
        return dict(self.terms)

    def __add__(self, other: AffineLike) -> "Affine":
        other = Affine.of(other)
        coeffs = self._coeffs()
        for sym, coef in other.terms:
            coeffs[sym] = coeffs.get(sym, 0) + coef
        return Affine._make(coeffs, self.const + other.const)

    def __sub__(self, other: AffineLike) -> "Affine":
        other = Affine.of(other)
        coeffs = self._coeffs()
        for sym, coef in other.terms:
            coeffs[sym] = coeffs.get(sym, 0) - coef
        return Affine._make(coeffs, self.const - other.const)

    def __neg__(self) -> "Affine":
        return Affine._make({s: -c for s, c in self.terms}, -self.const)

    @property
    def is_const(self) -> bool:
        return not self.terms

    def as_int(self) -> int:
        if not self.is_const:
            raise ValueError(f"affine expression {self} is not constant")
        return self.const

    def substitute(self, bindings: Mapping[str, int]) -> "Affine":
        coeffs: dict[str, int] = {}
        const = self.const
        for sym, coef in self.terms:
            if sym in bindings:
                const += coef * bindings[sym]
            else:
                coeffs[sym] = coeffs.get(sym, 0) + coef
        return Affine._make(coeffs, const)

    def symbols(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return str(self.const)
        parts: list[str] = []
        for sym, coef in self.terms:
            if not parts:
                if coef == 1:
                    parts.append(sym)
                elif coef == -1:
                    parts.append(f"-{sym}")
                else:
                    parts.append(f"{coef}*{sym}")
            else:
                sign = "+" if coef > 0 else "-"
                mag = abs(coef)
                parts.append(f"{sign}{sym}" if mag == 1 else f"{sign}{mag}*{sym}")
        if self.const > 0:
            parts.append(f"+{self.const}")
        elif self.const < 0:
            parts.append(str(self.const))
        return "".join(parts)
