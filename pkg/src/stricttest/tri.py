"""Three-valued logic used by every decision in the package."""
from __future__ import annotations

from enum import Enum


class Tri(Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value

    @property
    def known(self) -> bool:
        return self is not Tri.UNKNOWN

    @classmethod
    def of(cls, v: bool | None) -> "Tri":
        if v is None:
            return cls.UNKNOWN
        return cls.YES if v else cls.NO

    def __invert__(self) -> "Tri":
        return {Tri.YES: Tri.NO, Tri.NO: Tri.YES}.get(self, Tri.UNKNOWN)

    def __and__(self, other: "Tri") -> "Tri":
        return all_(self, other)

    def __or__(self, other: "Tri") -> "Tri":
        return any_(self, other)


def all_(*xs: Tri) -> Tri:
    if any(x is Tri.NO for x in xs):
        return Tri.NO
    if all(x is Tri.YES for x in xs):
        return Tri.YES
    return Tri.UNKNOWN


def any_(*xs: Tri) -> Tri:
    if any(x is Tri.YES for x in xs):
        return Tri.YES
    if all(x is Tri.NO for x in xs):
        return Tri.NO
    return Tri.UNKNOWN


def implies(a: Tri, b: Tri) -> Tri:
    return any_(~a, b)


def from_verdict(v) -> Tri:
    """Finite -> YES, Divergent -> NO, Inconclusive -> UNKNOWN."""
    if v.is_finite:
        return Tri.YES
    if v.is_divergent:
        return Tri.NO
    return Tri.UNKNOWN
