"""The blow-up tower and the involution-quotient model of the surface.

The tower is ``S <- S~ <- S~perp``: ``S~`` blows up the ``2g - 2`` points of
the section ``C0`` over the canonical divisor (classes ``E_i``), and
``S~perp`` blows up the ``4g + 4`` fixed points of the involution
(``sperp_i`` on ``C0`` and ``rperp_i`` off it).  The quotient surface
``S†`` by the lifted involution is never built; each of its classes is
represented by its pullback along the degree-2 quotient map ``phi``,
and intersections on ``S†`` are half the pairing of pullbacks.

Generator pullbacks installed in the model::

    C0_dag  ->  C0 - sum sperp_i - sum E_i          (strict transform of C0)
    F_dag   ->  (2g - 2) f                          (the canonical fibers)
    C1_dag  ->  C0 + (2g - 2) f - sum rperp_i - sum E_i
    s_dag_i ->  2 sperp_i
    r_dag_i ->  2 rperp_i
    K_dag   ->  pullback of K on S~ = K on S~perp - sum (sperp_i + rperp_i)

``C1`` is the symmetric section disjoint from ``C0`` away from the
canonical points, so it passes through the ``r_i`` and not the ``s_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Mapping, Sequence

from ._numbers import Rational, fmt, q
from .lattice import (
    DivisorClass,
    LatticeError,
    PullbackMap,
    SurfaceModel,
    blow_up,
    intersect,
    make_ruled_surface,
)

__all__ = [
    "ConsistencyError",
    "QuotientCoverModel",
    "DaggerClass",
    "PullbackReport",
    "build_quotient_model",
    "L_nnn",
    "lambda_class",
    "dagger_pullback",
    "dagger_intersect",
    "dagger_adjunction_genus",
    "verify_lambda_pullback",
    "verify_canonical_pullback",
    "rational_rank",
]


class ConsistencyError(RuntimeError):
    """An identity that must hold by construction did not."""


def E(i: int) -> str:
    return f"E_{i}"


def sperp(i: int) -> str:
    return f"sperp_{i}"


def rperp(i: int) -> str:
    return f"rperp_{i}"


def s_dag(i: int) -> str:
    return f"s_dag_{i}"


def r_dag(i: int) -> str:
    return f"r_dag_{i}"


C0_DAG, F_DAG, C1_DAG, K_DAG = "C0_dag", "F_dag", "C1_dag", "K_dag"


def rational_rank(rows: Sequence[Sequence[Rational]]) -> int:
    """Rank over Q by fraction-exact row reduction."""
    m = [[Fraction(x) for x in row] for row in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                factor = m[r][col] / p[col]
                m[r] = [a - factor * b for a, b in zip(m[r], p)]
        rank += 1
    return rank


def _sparse(d: DivisorClass) -> tuple[tuple[int, Rational], ...]:
    return tuple((i, c) for i, c in enumerate(d.coeffs) if c)


@dataclass(frozen=True, eq=False)
class QuotientCoverModel:
    genus: int
    base: SurfaceModel
    tilde: SurfaceModel
    top: SurfaceModel
    bl: PullbackMap
    bl_prime: PullbackMap
    generators: tuple[tuple[str, DivisorClass], ...]
    K_dagger_pullback: DivisorClass
    degree: int = 2

    # the whole model is a function of g
    def __eq__(self, other):
        if not isinstance(other, QuotientCoverModel):
            return NotImplemented
        return self.genus == other.genus

    def __hash__(self):
        return hash(("QuotientCoverModel", self.genus))

    @property
    def n_fixed(self) -> int:
        return 2 * self.genus + 2

    @cached_property
    def generator_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.generators)

    @cached_property
    def _table(self) -> dict[str, tuple[tuple[int, Rational], ...]]:
        return {name: _sparse(d) for name, d in self.generators}

    def generator(self, name: str) -> DivisorClass:
        for gname, d in self.generators:
            if gname == name:
                return d
        raise LatticeError(f"unknown generator {name!r}")

    def up(self, d: DivisorClass) -> DivisorClass:
        """Pull a class on ``S`` or ``S~`` all the way up to ``S~perp``."""
        if d.surface == self.base:
            d = self.bl(d)
        if d.surface == self.tilde:
            d = self.bl_prime(d)
        if d.surface != self.top:
            raise LatticeError(f"class on {d.surface.name} is not part of this tower")
        return d

    def total(self, labels) -> DivisorClass:
        """Sum of basis classes of the top surface."""
        return self.top.divisor({label: 1 for label in labels})

    def sum_E(self) -> DivisorClass:
        return self.total(E(i) for i in range(1, 2 * self.genus - 1))

    def sum_sperp(self) -> DivisorClass:
        return self.total(sperp(i) for i in range(1, self.n_fixed + 1))

    def sum_rperp(self) -> DivisorClass:
        return self.total(rperp(i) for i in range(1, self.n_fixed + 1))

    def dagger(self, coeffs: Mapping[str, object] | None = None) -> "DaggerClass":
        return DaggerClass.make(self, coeffs or {})

    def gen(self, name: str) -> "DaggerClass":
        return DaggerClass.make(self, {name: 1})

    @cached_property
    def canonical(self) -> "DaggerClass":
        return self.gen(K_DAG)

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "degree": self.degree,
            "top": self.top.to_json(),
            "generators": {name: [fmt(c) for c in d.coeffs] for name, d in self.generators},
            "K_dagger_pullback": [fmt(c) for c in self.K_dagger_pullback.coeffs],
        }


@dataclass(frozen=True, eq=False)
class DaggerClass:
    """A class on the quotient surface, as rational coefficients over generators.

    Two dagger classes are equal when their pullbacks agree; the pullback
    map is injective on the quotient's Picard group.
    """

    model: QuotientCoverModel
    gen_coeffs: tuple[tuple[str, Rational], ...]

    @classmethod
    def make(cls, model: QuotientCoverModel, coeffs: Mapping[str, object]) -> "DaggerClass":
        table = model._table
        acc: dict[str, Rational] = {}
        for name, c in coeffs.items():
            if name not in table:
                raise LatticeError(f"unknown generator {name!r}")
            acc[name] = q(acc.get(name, 0) + q(c))
        ordered = tuple((name, acc[name]) for name in model.generator_names if acc.get(name))
        return cls(model, ordered)

    def coeff(self, name: str) -> Rational:
        return dict(self.gen_coeffs).get(name, 0)

    @cached_property
    def pullback(self) -> DivisorClass:
        table = self.model._table
        vec: list[Rational] = [0] * self.model.top.dim
        for name, c in self.gen_coeffs:
            for i, v in table[name]:
                vec[i] += c * v
        return DivisorClass(self.model.top, tuple(q(x) for x in vec))

    def _check(self, other: "DaggerClass") -> None:
        if not isinstance(other, DaggerClass):
            raise TypeError(f"expected a DaggerClass, got {type(other).__name__}")
        if self.model != other.model:
            raise LatticeError("dagger classes belong to different quotient models")

    def __eq__(self, other):
        if not isinstance(other, DaggerClass):
            return NotImplemented
        return self.model == other.model and self.pullback.coeffs == other.pullback.coeffs

    def __hash__(self):
        return hash((self.model.genus, self.pullback.coeffs))

    def __add__(self, other: "DaggerClass") -> "DaggerClass":
        self._check(other)
        merged = dict(self.gen_coeffs)
        for name, c in other.gen_coeffs:
            merged[name] = merged.get(name, 0) + c
        return DaggerClass.make(self.model, merged)

    def __neg__(self) -> "DaggerClass":
        return DaggerClass(self.model, tuple((n, -c) for n, c in self.gen_coeffs))

    def __sub__(self, other: "DaggerClass") -> "DaggerClass":
        return self + (-other)

    def __mul__(self, scalar) -> "DaggerClass":
        s = q(scalar)
        return DaggerClass.make(self.model, {n: s * c for n, c in self.gen_coeffs})

    __rmul__ = __mul__

    def __str__(self) -> str:
        terms = [f"{fmt(c)}*{n}" for n, c in self.gen_coeffs]
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict:
        return {
            "genus": self.model.genus,
            "gen_coeffs": {n: fmt(c) for n, c in self.gen_coeffs},
            "pullback": [fmt(c) for c in self.pullback.coeffs],
        }


@dataclass(frozen=True)
class PullbackReport:
    n: int
    g: int
    mu: tuple[int, ...]
    lhs: DivisorClass
    rhs: DivisorClass
    match: bool

    def to_json(self) -> dict:
        return {
            "kind": "lambda_pullback",
            "n": self.n,
            "g": self.g,
            "mu": list(self.mu),
            "lhs": [fmt(c) for c in self.lhs.coeffs],
            "rhs": [fmt(c) for c in self.rhs.coeffs],
            "match": self.match,
        }


@dataclass(frozen=True)
class CanonicalReport:
    g: int
    lhs: DivisorClass  # K on S~perp minus the ramification divisor
    rhs: DivisorClass  # pullback of K on S~
    match: bool

    def to_json(self) -> dict:
        return {
            "kind": "canonical_pullback",
            "g": self.g,
            "lhs": [fmt(c) for c in self.lhs.coeffs],
            "rhs": [fmt(c) for c in self.rhs.coeffs],
            "match": self.match,
        }


@lru_cache(maxsize=None)
def build_quotient_model(g: int) -> QuotientCoverModel:
    base = make_ruled_surface(g, name="S")
    n_can, n_fix = 2 * g - 2, 2 * g + 2
    tilde, bl = blow_up(base, [E(i) for i in range(1, n_can + 1)], name="S~")
    top, bl_prime = blow_up(
        tilde,
        [sperp(i) for i in range(1, n_fix + 1)] + [rperp(i) for i in range(1, n_fix + 1)],
        name="S~perp",
    )
    up = bl.then(bl_prime)
    C0, f = up(base.cls("C0")), up(base.cls("f"))
    sum_E = top.divisor({E(i): 1 for i in range(1, n_can + 1)})
    sum_s = top.divisor({sperp(i): 1 for i in range(1, n_fix + 1)})
    sum_r = top.divisor({rperp(i): 1 for i in range(1, n_fix + 1)})

    K_dagger = bl_prime(tilde.canonical)
    gens: list[tuple[str, DivisorClass]] = [
        (C0_DAG, C0 - sum_s - sum_E),
        (F_DAG, (2 * g - 2) * f),
        (C1_DAG, C0 + (2 * g - 2) * f - sum_r - sum_E),
    ]
    gens += [(s_dag(i), 2 * top.cls(sperp(i))) for i in range(1, n_fix + 1)]
    gens += [(r_dag(i), 2 * top.cls(rperp(i))) for i in range(1, n_fix + 1)]
    gens.append((K_DAG, K_dagger))

    model = QuotientCoverModel(
        genus=g,
        base=base,
        tilde=tilde,
        top=top,
        bl=bl,
        bl_prime=bl_prime,
        generators=tuple(gens),
        K_dagger_pullback=K_dagger,
    )
    _verify_model(model)
    return model


def _verify_model(model: QuotientCoverModel) -> None:
    g = model.genus
    top = model.top
    gen = model.generator
    C0, f = model.up(model.base.cls("C0")), model.up(model.base.cls("f"))
    sum_E, sum_s, sum_r = model.sum_E(), model.sum_sperp(), model.sum_rperp()

    for i in range(1, model.n_fixed + 1):
        if gen(s_dag(i)) != 2 * top.cls(sperp(i)) or gen(r_dag(i)) != 2 * top.cls(rperp(i)):
            raise ConsistencyError(f"fixed-point generator {i} does not pull back to twice its curve")
    # combined identity, linear in n, so n = 1 suffices
    if gen(C0_DAG) + gen(F_DAG) != C0 + (2 * g - 2) * f - sum_s - sum_E:
        raise ConsistencyError("C0_dag + F_dag does not pull back to the strict transform of C0 + K f")
    if gen(C1_DAG) != gen(C0_DAG) + gen(F_DAG) + sum_s - sum_r:
        raise ConsistencyError("C1_dag relation fails")
    if not verify_canonical_pullback(model).match:
        raise ConsistencyError("the two constructions of the pulled-back canonical class differ")
    independent = [d.coeffs for name, d in model.generators if name not in (C1_DAG, K_DAG)]
    if rational_rank(independent) != len(independent):
        raise ConsistencyError("generator pullbacks are linearly dependent")


def verify_canonical_pullback(model: QuotientCoverModel) -> CanonicalReport:
    """Compare ``K(S~perp) - sum(sperp + rperp)`` with the pullback of ``K(S~)``."""
    lhs = model.top.canonical - model.sum_sperp() - model.sum_rperp()
    rhs = model.bl_prime(model.tilde.canonical)
    stored = model.K_dagger_pullback
    return CanonicalReport(model.genus, lhs, rhs, lhs == rhs == stored)


@lru_cache(maxsize=256)
def L_nnn(model: QuotientCoverModel, n: int) -> DivisorClass:
    """``bl*(n C0 + n K f) - n sum E_i``, pulled up to the top surface."""
    if n < 1:
        raise ValueError("n must be >= 1")
    g = model.genus
    tilde = model.tilde
    on_tilde = model.bl(model.base.divisor({"C0": n, "f": n * (2 * g - 2)})) - n * tilde.divisor(
        {E(i): 1 for i in range(1, 2 * g - 1)}
    )
    return model.bl_prime(on_tilde)


def _mu_tuple(model: QuotientCoverModel, n: int, mu) -> tuple[int, ...]:
    entries = tuple(getattr(mu, "entries", mu))
    if len(entries) != model.n_fixed:
        raise ValueError(f"type must have {model.n_fixed} entries for g={model.genus}, got {len(entries)}")
    if any(not isinstance(m, int) or m < 0 for m in entries):
        raise ValueError("type entries must be non-negative integers")
    if n <= 2:
        raise ValueError("lemma requires n > 2")
    if any((m - n) % 2 for m in entries):
        raise ValueError("type not adapted to n")
    return entries


def _half(x: int) -> Rational:
    return x // 2 if x % 2 == 0 else Fraction(x, 2)


def lambda_class(model: QuotientCoverModel, n: int, mu) -> DaggerClass:
    """The class on the quotient whose pullback is ``L_nnn - sum mu_i rperp_i``."""
    return _lambda_class(model, n, _mu_tuple(model, n, mu))


@lru_cache(maxsize=4096)
def _lambda_class(model: QuotientCoverModel, n: int, entries: tuple[int, ...]) -> DaggerClass:
    k = model.n_fixed
    if n % 2 == 0:
        coeffs = {C0_DAG: n, F_DAG: n}
        coeffs.update({s_dag(i): _half(n) for i in range(1, k + 1)})
        coeffs.update({r_dag(i): -_half(m) for i, m in enumerate(entries, 1)})
    else:
        coeffs = {C1_DAG: 1, C0_DAG: n - 1, F_DAG: n - 1}
        coeffs.update({s_dag(i): _half(n - 1) for i in range(1, k + 1)})
        coeffs.update({r_dag(i): -_half(m - 1) for i, m in enumerate(entries, 1)})
    lam = DaggerClass.make(model, coeffs)
    if not all(isinstance(c, int) for _, c in lam.gen_coeffs):
        raise ConsistencyError(f"non-integral generator coefficients for n={n}, mu={entries}")
    return lam


def dagger_pullback(model: QuotientCoverModel, a: DaggerClass) -> DivisorClass:
    if a.model != model:
        raise LatticeError("dagger class belongs to a different quotient model")
    return a.pullback


def dagger_intersect(model: QuotientCoverModel, a: DaggerClass, b: DaggerClass) -> Rational:
    """``a . b`` on the quotient: half the pairing of the pullbacks."""
    pa, pb = dagger_pullback(model, a), dagger_pullback(model, b)
    return q(Fraction(intersect(pa, pb), model.degree))


def dagger_adjunction_genus(model: QuotientCoverModel, a: DaggerClass) -> Rational:
    return q(1 + Fraction(dagger_intersect(model, a, a) + dagger_intersect(model, a, model.canonical), 2))


def verify_lambda_pullback(model: QuotientCoverModel, n: int, mu) -> PullbackReport:
    lam = lambda_class(model, n, mu)
    entries = _mu_tuple(model, n, mu)
    lhs = dagger_pullback(model, lam)
    rhs = L_nnn(model, n) - model.top.divisor({rperp(i): m for i, m in enumerate(entries, 1)})
    return PullbackReport(n, model.genus, entries, lhs, rhs, lhs == rhs)
