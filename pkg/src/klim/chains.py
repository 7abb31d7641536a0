"""Formal rational combinations of hashable basis labels."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable


class Chain(dict):
    """A finite map ``label -> nonzero coefficient``.

    Coefficients are ints or Fractions; zero terms are never stored.
    """

    @classmethod
    def single(cls, label, coeff=1) -> "Chain":
        c = cls()
        c.add(label, coeff)
        return c

    def add(self, label, coeff) -> None:
        if not coeff:
            return
        v = self.get(label, 0) + coeff
        if v:
            self[label] = v
        else:
            del self[label]

    def __add__(self, other: "Chain") -> "Chain":
        out = Chain(self)
        for k, v in other.items():
            out.add(k, v)
        return out

    def __sub__(self, other: "Chain") -> "Chain":
        return self + other.scale(-1)

    def scale(self, c) -> "Chain":
        if not c:
            return Chain()
        return Chain({k: v * c for k, v in self.items()})

    def __neg__(self) -> "Chain":
        return self.scale(-1)

    def apply(self, op: Callable[[Hashable], "Chain"]) -> "Chain":
        """Extend ``op`` (basis label -> Chain) linearly."""
        out = Chain()
        for k, v in self.items():
            for k2, v2 in op(k).items():
                out.add(k2, v * v2)
        return out

    def bilinear(self, other: "Chain", op) -> "Chain":
        out = Chain()
        for k1, v1 in self.items():
            for k2, v2 in other.items():
                for k, v in op(k1, k2).items():
                    out.add(k, v1 * v2 * v)
        return out


def total(chains: Iterable[Chain]) -> Chain:
    out = Chain()
    for c in chains:
        for k, v in c.items():
            out.add(k, v)
    return out
