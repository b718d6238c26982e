"""Formal transition matrices of the rank-2 and rank-(g+1) affine bundles.

Entries are affine-linear forms in abstract chart symbols.  The rank-2
matrix's corner entry ``(g_ij - 1) z_i`` with ``g_ij = z_j / z_i`` is used
in its simplified form ``z_j - z_i``, so everything stays inside the ring
of linear forms.  Products of two non-constant forms never arise for these
upper-triangular unipotent matrices; attempting one raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ._numbers import Rational, fmt, q

__all__ = [
    "FormalLinear",
    "FormalMatrix",
    "CocycleReport",
    "chart_symbol",
    "transition_matrix_rank2",
    "transition_matrix_affine",
    "transition_matrix",
    "verify_cocycle",
    "affine_action",
]


def chart_symbol(i: int, k: int | None = None) -> str:
    """``z_i`` on the curve, or ``z'_{k,i}`` (k-th coordinate on chart i of the Jacobian)."""
    return f"z_{i}" if k is None else f"z'_{k},{i}"


@dataclass(frozen=True)
class FormalLinear:
    constant: Rational = 0
    terms: tuple[tuple[str, Rational], ...] = ()

    @classmethod
    def make(cls, constant=0, terms: Mapping[str, object] | None = None) -> "FormalLinear":
        acc: dict[str, Rational] = {}
        for sym, c in (terms or {}).items():
            acc[sym] = q(acc.get(sym, 0) + q(c))
        return cls(q(constant), tuple(sorted((s, c) for s, c in acc.items() if c != 0)))

    @classmethod
    def symbol(cls, name: str) -> "FormalLinear":
        return cls.make(0, {name: 1})

    @classmethod
    def const(cls, c) -> "FormalLinear":
        return cls.make(c)

    def is_constant(self) -> bool:
        return not self.terms

    def __add__(self, other) -> "FormalLinear":
        other = _lift(other)
        terms = dict(self.terms)
        for s, c in other.terms:
            terms[s] = terms.get(s, 0) + c
        return FormalLinear.make(self.constant + other.constant, terms)

    __radd__ = __add__

    def __neg__(self) -> "FormalLinear":
        return FormalLinear(-self.constant, tuple((s, -c) for s, c in self.terms))

    def __sub__(self, other) -> "FormalLinear":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "FormalLinear":
        return _lift(other) - self

    def __mul__(self, other) -> "FormalLinear":
        other = _lift(other)
        if not self.is_constant() and not other.is_constant():
            raise ValueError("product of two non-constant linear forms leaves the linear algebra")
        if self.is_constant():
            self, other = other, self
        c = other.constant
        return FormalLinear.make(self.constant * c, {s: v * c for s, v in self.terms})

    __rmul__ = __mul__

    def __str__(self) -> str:
        parts = [f"{fmt(c)}*{s}" for s, c in self.terms]
        if self.constant or not parts:
            parts.insert(0, fmt(self.constant))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"constant": fmt(self.constant), "terms": {s: fmt(c) for s, c in self.terms}}


def _lift(x) -> FormalLinear:
    return x if isinstance(x, FormalLinear) else FormalLinear.const(x)


ZERO = FormalLinear.const(0)
ONE = FormalLinear.const(1)


@dataclass(frozen=True)
class FormalMatrix:
    entries: tuple[tuple[FormalLinear, ...], ...]

    def __post_init__(self):
        d = len(self.entries)
        if any(len(row) != d for row in self.entries):
            raise ValueError("formal matrices must be square")

    @property
    def dim(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, dim: int) -> "FormalMatrix":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(dim)) for i in range(dim)))

    def __matmul__(self, other: "FormalMatrix") -> "FormalMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        d = self.dim
        rows = []
        for i in range(d):
            row = []
            for k in range(d):
                acc = ZERO
                for j in range(d):
                    a, b = self.entries[i][j], other.entries[j][k]
                    if a != ZERO and b != ZERO:
                        acc = acc + a * b
                row.append(acc)
            rows.append(tuple(row))
        return FormalMatrix(tuple(rows))

    def is_identity(self) -> bool:
        return self == FormalMatrix.identity(self.dim)

    def is_unipotent_upper(self) -> bool:
        return all(
            self.entries[i][j] == (ONE if i == j else ZERO)
            for i in range(self.dim)
            for j in range(i + 1)
        )

    def det(self) -> FormalLinear:
        """Laplace expansion along the first column."""
        return _det([list(row) for row in self.entries])

    def apply(self, vec: Sequence[FormalLinear]) -> tuple[FormalLinear, ...]:
        if len(vec) != self.dim:
            raise ValueError(f"vector has length {len(vec)}, matrix has size {self.dim}")
        out = []
        for row in self.entries:
            acc = ZERO
            for a, v in zip(row, vec):
                if a != ZERO and _lift(v) != ZERO:
                    acc = acc + a * _lift(v)
            out.append(acc)
        return tuple(out)

    def to_json(self) -> list:
        return [[str(e) for e in row] for row in self.entries]


def _det(m: list[list[FormalLinear]]) -> FormalLinear:
    if len(m) == 1:
        return m[0][0]
    total = ZERO
    for i, row in enumerate(m):
        a = row[0]
        if a == ZERO:
            continue
        minor = [r[1:] for k, r in enumerate(m) if k != i]
        term = a * _det(minor)
        total = total - term if i % 2 else total + term
    return total


def transition_matrix_rank2(i: int, j: int) -> FormalMatrix:
    """``[[1, z_j - z_i], [0, 1]]``."""
    corner = FormalLinear.symbol(chart_symbol(j)) - FormalLinear.symbol(chart_symbol(i))
    return FormalMatrix(((ONE, corner), (ZERO, ONE)))


def transition_matrix_affine(i: int, j: int, g: int) -> FormalMatrix:
    """Identity of size ``g + 1`` with last column ``z'_{k,j} - z'_{k,i}`` for ``k = 1..g``."""
    if g < 1:
        raise ValueError("g must be >= 1")
    d = g + 1
    rows = []
    for k in range(d):
        row = [ONE if c == k else ZERO for c in range(d)]
        if k < g:
            row[g] = FormalLinear.symbol(chart_symbol(j, k + 1)) - FormalLinear.symbol(
                chart_symbol(i, k + 1)
            )
        rows.append(tuple(row))
    return FormalMatrix(tuple(rows))


def _parse_kind(kind: str, g: int | None) -> tuple[str, int | None]:
    if kind == "rank2":
        return "rank2", None
    if kind.startswith("affine(") and kind.endswith(")"):
        return "affine", int(kind[len("affine("):-1])
    if kind == "affine":
        if g is None:
            raise ValueError("affine kind needs g")
        return "affine", g
    raise ValueError(f"unknown transition kind {kind!r}")


def transition_matrix(i: int, j: int, kind: str = "rank2", g: int | None = None) -> FormalMatrix:
    base, g = _parse_kind(kind, g)
    return transition_matrix_rank2(i, j) if base == "rank2" else transition_matrix_affine(i, j, g)


@dataclass
class CocycleReport:
    kind: str
    m: int
    identities_checked: int
    triples_checked: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.m,
            "identities_checked": self.identities_checked,
            "triples_checked": self.triples_checked,
            "failures": list(self.failures),
        }


def verify_cocycle(m: int, kind: str = "rank2", g: int | None = None) -> CocycleReport:
    """Check ``G_ii = I``, ``G_ij G_ji = I``, ``G_ij G_jk = G_ik`` and ``det = 1`` over ``m`` charts."""
    if m < 2:
        raise ValueError("need at least 2 charts")
    base, g = _parse_kind(kind, g)
    label = "rank2" if base == "rank2" else f"affine({g})"
    charts = range(1, m + 1)
    G = {(i, j): transition_matrix(i, j, base, g) for i in charts for j in charts}
    failures: list[str] = []
    checked = triples = 0

    for i in charts:
        checked += 1
        if not G[i, i].is_identity():
            failures.append(f"G_{i}{i} != I")
    for (i, j), mat in G.items():
        checked += 2
        if not (mat @ G[j, i]).is_identity():
            failures.append(f"G_{i}{j} G_{j}{i} != I")
        if not mat.is_unipotent_upper() or mat.det() != ONE:
            failures.append(f"G_{i}{j} is not unipotent with det 1")
    for i in charts:
        for j in charts:
            for k in charts:
                checked += 1
                triples += 1
                if G[i, j] @ G[j, k] != G[i, k]:
                    failures.append(f"G_{i}{j} G_{j}{k} != G_{i}{k}")
    return CocycleReport(label, m, checked, triples, failures)


def affine_action(
    w: Sequence[FormalLinear], i: int, j: int, kind: str = "rank2", g: int | None = None
) -> tuple[FormalLinear, ...]:
    """Apply ``G_ij`` to ``(w, 1)`` and return the affine part ``w + (chart differences)``."""
    mat = transition_matrix(i, j, kind, g)
    if len(w) != mat.dim - 1:
        raise ValueError(f"fiber dimension is {mat.dim - 1}, got a vector of length {len(w)}")
    image = mat.apply(tuple(_lift(x) for x in w) + (ONE,))
    if image[-1] != ONE:
        raise ValueError("transition matrix does not preserve the affine chart")
    return image[:-1]
