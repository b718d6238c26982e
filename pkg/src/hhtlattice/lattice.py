"""Numerical Picard lattices of a ruled surface and its blow-ups.

A :class:`SurfaceModel` is an ordered basis of class labels together with a
symmetric rational intersection form and the coefficient vector of the
canonical class.  Divisors are coefficient vectors over that basis
(:class:`DivisorClass`).  Linear equivalence is coarsened to numerical
equivalence throughout, so a sum of ``2g - 2`` fibers is simply
``(2g - 2) * f``.

Basis order is fixed: ``C0, f`` first, then exceptional classes in the order
they were introduced by :func:`blow_up`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from ._numbers import Rational, fmt, parse, q

__all__ = [
    "LatticeError",
    "SurfaceMismatchError",
    "SurfaceModel",
    "DivisorClass",
    "PullbackMap",
    "make_ruled_surface",
    "blow_up",
    "intersect",
    "pullback",
    "adjunction_genus",
]


class LatticeError(ValueError):
    pass


class SurfaceMismatchError(LatticeError):
    pass


def _same_surface(a: "SurfaceModel", b: "SurfaceModel") -> bool:
    return a is b or a == b


@dataclass(frozen=True)
class SurfaceModel:
    name: str
    genus: int
    basis: tuple[str, ...]
    form: tuple[tuple[Rational, ...], ...]
    canonical_coeffs: tuple[Rational, ...]
    exceptional: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        d = len(self.basis)
        if len(set(self.basis)) != d:
            raise LatticeError(f"duplicate basis labels in {self.basis}")
        if len(self.form) != d or any(len(row) != d for row in self.form):
            raise LatticeError("intersection form must be a square matrix of basis size")
        if len(self.canonical_coeffs) != d:
            raise LatticeError("canonical class has the wrong length")
        for i in range(d):
            for j in range(i):
                if self.form[i][j] != self.form[j][i]:
                    raise LatticeError(f"form is not symmetric at ({i}, {j})")
        if not self.exceptional <= set(self.basis):
            raise LatticeError("exceptional labels must be basis labels")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.basis)}

    @cached_property
    def _entries(self) -> tuple[tuple[int, int, Rational], ...]:
        # nonzero entries only; blow-up lattices are very sparse
        return tuple(
            (i, j, v)
            for i, row in enumerate(self.form)
            for j, v in enumerate(row)
            if v != 0
        )

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise LatticeError(f"{label!r} is not a basis label of {self.name}") from None

    def cls(self, label: str) -> "DivisorClass":
        """The basis class named ``label``."""
        coeffs = [0] * self.dim
        coeffs[self.index(label)] = 1
        return DivisorClass(self, tuple(coeffs))

    def divisor(self, coeffs: Mapping[str, object] | None = None) -> "DivisorClass":
        """Build a class from a ``{label: coefficient}`` mapping."""
        vec = [0] * self.dim
        for label, c in (coeffs or {}).items():
            vec[self.index(label)] += q(c)
        return DivisorClass(self, tuple(q(c) for c in vec))

    def zero(self) -> "DivisorClass":
        return DivisorClass(self, (0,) * self.dim)

    @property
    def canonical(self) -> "DivisorClass":
        return DivisorClass(self, self.canonical_coeffs)

    def pair(self, a: Sequence[Rational], b: Sequence[Rational]) -> Rational:
        """Raw pairing of two coefficient vectors (no surface checks)."""
        total = 0
        for i, j, v in self._entries:
            ai = a[i]
            if ai:
                bj = b[j]
                if bj:
                    total += ai * v * bj
        return q(total)

    def to_json(self) -> dict:
        return {
            "surface": self.name,
            "genus": self.genus,
            "basis": list(self.basis),
            "form": [[fmt(v) for v in row] for row in self.form],
            "canonical": [fmt(v) for v in self.canonical_coeffs],
            "exceptional": [b for b in self.basis if b in self.exceptional],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SurfaceModel":
        return cls(
            name=data["surface"],
            genus=int(data["genus"]),
            basis=tuple(data["basis"]),
            form=tuple(tuple(parse(v) for v in row) for row in data["form"]),
            canonical_coeffs=tuple(parse(v) for v in data["canonical"]),
            exceptional=frozenset(data.get("exceptional", ())),
        )


@dataclass(frozen=True)
class DivisorClass:
    surface: SurfaceModel
    coeffs: tuple[Rational, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.surface.dim:
            raise LatticeError(
                f"class has {len(self.coeffs)} coefficients, "
                f"surface {self.surface.name} has rank {self.surface.dim}"
            )

    def _check(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass):
            raise TypeError(f"expected a DivisorClass, got {type(other).__name__}")
        if not _same_surface(self.surface, other.surface):
            raise SurfaceMismatchError(
                f"classes live on different surfaces ({self.surface.name} vs {other.surface.name})"
            )

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.surface, tuple(q(a + b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(self.surface, tuple(q(a - b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.surface, tuple(-a for a in self.coeffs))

    def __mul__(self, scalar) -> "DivisorClass":
        c = q(scalar)
        return DivisorClass(self.surface, tuple(q(c * a) for a in self.coeffs))

    __rmul__ = __mul__

    def __getitem__(self, label: str) -> Rational:
        return self.coeffs[self.surface.index(label)]

    def dot(self, other: "DivisorClass") -> Rational:
        return intersect(self, other)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def as_dict(self) -> dict[str, Rational]:
        return {b: c for b, c in zip(self.surface.basis, self.coeffs) if c}

    def __str__(self) -> str:
        terms = [f"{fmt(c)}*{b}" for b, c in self.as_dict().items()]
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict:
        s = self.surface
        return {
            "surface": s.name,
            "genus": s.genus,
            "basis": list(s.basis),
            "coeffs": [fmt(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: Mapping, surface: SurfaceModel) -> "DivisorClass":
        if data["surface"] != surface.name or list(data["basis"]) != list(surface.basis):
            raise SurfaceMismatchError(f"serialized class does not belong to {surface.name}")
        return cls(surface, tuple(parse(c) for c in data["coeffs"]))


@dataclass(frozen=True)
class PullbackMap:
    """Pullback along a blow-up: an isometric embedding of the source basis.

    ``index_map[k]`` is the target position of the k-th source basis class;
    every other target coefficient of a pulled-back class is zero.
    """

    source: SurfaceModel
    target: SurfaceModel
    index_map: tuple[int, ...]

    def __post_init__(self):
        if len(self.index_map) != self.source.dim:
            raise LatticeError("pullback map does not cover the source basis")

    @classmethod
    def identity(cls, surface: SurfaceModel) -> "PullbackMap":
        return cls(surface, surface, tuple(range(surface.dim)))

    def __call__(self, d: DivisorClass) -> DivisorClass:
        return pullback(self, d)

    def then(self, other: "PullbackMap") -> "PullbackMap":
        """Compose: pull back along ``self`` and then along ``other``."""
        if not _same_surface(self.target, other.source):
            raise SurfaceMismatchError("pullback maps do not compose")
        return PullbackMap(self.source, other.target, tuple(other.index_map[k] for k in self.index_map))


def make_ruled_surface(g: int, name: str = "S") -> SurfaceModel:
    """The ruled surface over a genus-``g`` curve: ``C0^2 = f^2 = 0``, ``C0.f = 1``.

    The canonical class is ``-2 C0 + (2g - 2) f``.
    """
    if not isinstance(g, int) or g < 2:
        raise LatticeError("base curve must have genus >= 2")
    return SurfaceModel(
        name=name,
        genus=g,
        basis=("C0", "f"),
        form=((0, 1), (1, 0)),
        canonical_coeffs=(-2, 2 * g - 2),
    )


def blow_up(
    surface: SurfaceModel, labels: Iterable[str], name: str | None = None
) -> tuple[SurfaceModel, PullbackMap]:
    """Blow up one distinct point per label.

    Each new label is an exceptional class with self-intersection -1,
    orthogonal to everything pulled back and to the other new classes.
    The canonical class gains one copy of each new exceptional class.
    """
    labels = list(labels)
    if not labels:
        return surface, PullbackMap.identity(surface)
    seen = set(surface.basis)
    for label in labels:
        if label in seen:
            raise LatticeError(f"duplicate label {label!r}")
        seen.add(label)

    d, k = surface.dim, len(labels)
    form = [list(row) + [0] * k for row in surface.form]
    for i in range(k):
        row = [0] * (d + k)
        row[d + i] = -1
        form.append(row)
    blown = SurfaceModel(
        name=name or f"{surface.name}'",
        genus=surface.genus,
        basis=surface.basis + tuple(labels),
        form=tuple(tuple(row) for row in form),
        canonical_coeffs=surface.canonical_coeffs + (1,) * k,
        exceptional=surface.exceptional | frozenset(labels),
    )
    return blown, PullbackMap(surface, blown, tuple(range(d)))


def intersect(d1: DivisorClass, d2: DivisorClass) -> Rational:
    """Intersection number ``d1 . d2`` as an exact rational."""
    d1._check(d2)
    return d1.surface.pair(d1.coeffs, d2.coeffs)


def pullback(pmap: PullbackMap, d: DivisorClass) -> DivisorClass:
    if not _same_surface(pmap.source, d.surface):
        raise SurfaceMismatchError(
            f"class lives on {d.surface.name}, map pulls back from {pmap.source.name}"
        )
    if pmap.source is pmap.target:
        return d
    vec = [0] * pmap.target.dim
    for k, c in zip(pmap.index_map, d.coeffs):
        vec[k] = c
    return DivisorClass(pmap.target, tuple(vec))


def adjunction_genus(surface: SurfaceModel, d: DivisorClass) -> Rational:
    """``1 + (D^2 + K.D) / 2``: the arithmetic genus for an integral curve class."""
    k = surface.canonical
    k._check(d)
    return q(1 + Fraction(intersect(d, d) + intersect(k, d), 2))
