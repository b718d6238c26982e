"""Lattice checks of the lambda lemmas, admissibility and type enumeration.

Every check computes its value on the lattice first and only then compares
with the closed form; the lattice value is the authoritative one.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterator, Sequence

from ._numbers import Rational, fmt, q
from .cover import (
    ConsistencyError,
    E,
    PullbackReport,
    QuotientCoverModel,
    build_quotient_model,
    dagger_intersect,
    lambda_class,
    rperp,
    verify_canonical_pullback,
    verify_lambda_pullback,
)

__all__ = [
    "CoverType",
    "VerificationReport",
    "EnumerationResult",
    "check_lambda_dot_K",
    "check_lambda_self",
    "genus_lambda",
    "genus_closed_form",
    "is_adapted",
    "is_admissible",
    "type_bound",
    "enumerate_cover_types",
    "moduli_dimension",
    "rigidity_constant",
    "finiteness_summary",
    "TypeVerification",
    "verify_type",
    "verify_sweep",
    "WORKERS_ENV",
]

log = logging.getLogger(__name__)

WORKERS_ENV = "HHTLATTICE_WORKERS"


@dataclass(frozen=True)
class CoverType:
    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if any(not isinstance(m, int) or m < 0 for m in self.entries):
            raise ValueError("type entries must be non-negative integers")

    @property
    def g(self) -> int:
        return (len(self.entries) - 2) // 2

    @property
    def mu2(self) -> int:
        return sum(m * m for m in self.entries)

    @property
    def adapted(self) -> bool:
        return is_adapted(self.n, self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class VerificationReport:
    kind: str
    n: int
    g: int
    mu: tuple[int, ...]
    computed: Rational
    closed_form: Rational
    match: bool
    chain: tuple[Rational, ...] = ()
    chain_closed_form: tuple[Rational, ...] = ()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "g": self.g,
            "mu": list(self.mu),
            "computed": fmt(self.computed),
            "closed_form": fmt(self.closed_form),
            "chain": [fmt(c) for c in self.chain],
            "chain_closed_form": [fmt(c) for c in self.chain_closed_form],
            "match": self.match,
        }


def _entries(mu) -> tuple[int, ...]:
    return tuple(getattr(mu, "entries", mu))


def check_lambda_dot_K(model: QuotientCoverModel, n: int, mu) -> VerificationReport:
    """``lambda . K = 0`` on the quotient, plus the three-term expansion.

    The chain is the expansion of ``L_nnn . K(S~)`` on ``S~`` into
    ``nC0 . Kf``, ``nKf . (-2 C0)`` and ``(-n sum E) . (sum E)``.
    """
    g = model.genus
    lam = lambda_class(model, n, mu)
    value = dagger_intersect(model, lam, model.canonical)
    chain = _dot_k_chain(model, n)
    k = n * (2 * g - 2)
    closed_chain = (k, -2 * k, k)
    ok = value == 0 and chain == closed_chain and sum(chain) == 0
    return VerificationReport("lambda_dot_K", n, g, _entries(mu), value, 0, ok, chain, closed_chain)


@lru_cache(maxsize=64)
def _dot_k_chain(model: QuotientCoverModel, n: int) -> tuple[Rational, ...]:
    g = model.genus
    tilde, bl, base = model.tilde, model.bl, model.base
    sum_E = tilde.divisor({E(i): 1 for i in range(1, 2 * g - 1)})
    t1 = bl(base.divisor({"C0": n})).dot(bl(base.divisor({"f": 2 * g - 2})))
    t2 = bl(base.divisor({"f": n * (2 * g - 2)})).dot(bl(base.divisor({"C0": -2})))
    t3 = (-n * sum_E).dot(sum_E)
    return (t1, t2, t3)


@lru_cache(maxsize=64)
def _self_chain_head(model: QuotientCoverModel, n: int) -> tuple[Rational, Rational]:
    g = model.genus
    big = model.base.divisor({"C0": n, "f": n * (2 * g - 2)})
    nE = n * model.tilde.divisor({E(i): 1 for i in range(1, 2 * g - 1)})
    return big.dot(big), nE.dot(nE)


def check_lambda_self(model: QuotientCoverModel, n: int, mu) -> VerificationReport:
    """``lambda^2 = (n^2 (2g - 2) - mu2) / 2`` by lattice arithmetic.

    Chain entries are the three pieces of ``(pullback lambda)^2``: the pulled
    back ``(nC0 + nKf)^2``, the ``(n sum E)^2`` part and ``(sum mu_i rperp_i)^2``.
    """
    g = model.genus
    entries = _entries(mu)
    lam = lambda_class(model, n, mu)
    value = dagger_intersect(model, lam, lam)

    r = model.top.divisor({rperp(i): m for i, m in enumerate(entries, 1)})
    chain = _self_chain_head(model, n) + (r.dot(r),)

    mu2 = sum(m * m for m in entries)
    closed = q(Fraction(n * n * (2 * g - 2) - mu2, 2))
    closed_chain = (2 * n * n * (2 * g - 2), -n * n * (2 * g - 2), -mu2)
    ok = value == closed and chain == closed_chain
    return VerificationReport("lambda_self", n, g, entries, value, closed, ok, chain, closed_chain)


def genus_closed_form(n: int, g: int, mu) -> Rational:
    mu2 = sum(m * m for m in _entries(mu))
    return q(1 + Fraction(n * n * (2 * g - 2) - mu2, 4))


def genus_lambda(model: QuotientCoverModel, n: int, mu) -> int:
    """Arithmetic genus of ``lambda(n, mu)`` by adjunction on the quotient.

    May be negative; a negative value means the type is not admissible.
    """
    g = model.genus
    entries = _entries(mu)
    lam = lambda_class(model, n, mu)
    self_ = dagger_intersect(model, lam, lam)
    dot_k = dagger_intersect(model, lam, model.canonical)
    genus = q(1 + Fraction(self_ + dot_k, 2))
    closed = genus_closed_form(n, g, entries)
    if (n * n * (2 * g - 2) - sum(m * m for m in entries)) % 4:
        raise ConsistencyError(f"n^2(2g-2) - mu2 is not divisible by 4 for n={n}, mu={entries}")
    if genus != closed:
        raise ConsistencyError(f"lattice genus {fmt(genus)} differs from closed form {fmt(closed)}")
    if not isinstance(genus, int):
        raise ConsistencyError(f"non-integral genus {fmt(genus)} for n={n}, mu={entries}")
    return genus


def type_bound(n: int, g: int) -> int:
    """Largest admissible ``mu2``: ``n^2 (2g - 2) + 4``."""
    return n * n * (2 * g - 2) + 4


def is_adapted(n: int, mu) -> bool:
    return all((m - n) % 2 == 0 for m in _entries(mu))


def is_admissible(n: int, g: int, mu) -> bool:
    entries = _entries(mu)
    if len(entries) != 2 * g + 2:
        raise ValueError(f"type must have {2 * g + 2} entries for g={g}, got {len(entries)}")
    return is_adapted(n, entries) and sum(m * m for m in entries) <= type_bound(n, g)


@dataclass
class EnumerationResult:
    n: int
    g: int
    mode: str
    bound: int
    types: list[tuple[int, ...]] = field(default_factory=list)
    warning: str | None = None

    @property
    def count(self) -> int:
        return len(self.types)

    def __iter__(self) -> Iterator[CoverType]:
        return (CoverType(t, self.n) for t in self.types)

    def __len__(self) -> int:
        return len(self.types)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "g": self.g,
            "bound": self.bound,
            "mode": self.mode,
            "count": self.count,
            "types": [list(t) for t in self.types],
        }
        if self.warning:
            out["warning"] = self.warning
        return out

    def csv_rows(self) -> Iterator[list[str]]:
        k = 2 * self.g + 2
        yield [f"mu_{i}" for i in range(1, k + 1)] + ["mu2", "genus"]
        for t in self.types:
            mu2 = sum(m * m for m in t)
            yield [str(m) for m in t] + [str(mu2), fmt(genus_closed_form(self.n, self.g, t))]


def _extend(prefix: tuple[int, ...], length: int, start: int, remaining: int, cap: int | None):
    """Lexicographic completions of ``prefix``; ``cap`` bounds entries (multiset mode)."""
    if len(prefix) == length:
        yield prefix
        return
    x = start
    while x * x <= remaining and (cap is None or x <= cap):
        yield from _extend(prefix + (x,), length, start, remaining - x * x, x if cap is not None else None)
        x += 2


def _branch(args) -> list[tuple[int, ...]]:
    first, length, start, bound, multiset = args
    cap = first if multiset else None
    return list(_extend((first,), length, start, bound - first * first, cap))


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def enumerate_cover_types(
    n: int, g: int, mode: str = "ordered", workers: int = 1
) -> EnumerationResult:
    """All adapted types with ``mu2 <= n^2 (2g - 2) + 4``.

    ``ordered`` lists tuples lexicographically; ``multiset`` lists one
    non-increasing representative per multiset, also lexicographically.
    The search is split on the first entry; with ``workers > 1`` the
    branches run in separate processes and are concatenated in order.
    """
    if g < 2:
        raise ValueError("base curve must have genus >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode not in ("ordered", "multiset"):
        raise ValueError(f"unknown mode {mode!r}")
    bound = type_bound(n, g)
    length, start = 2 * g + 2, n % 2
    firsts = list(range(start, math.isqrt(bound) + 1, 2))
    jobs = [(x, length, start, bound, mode == "multiset") for x in firsts]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            branches = list(pool.map(_branch, jobs))
    else:
        branches = [_branch(job) for job in jobs]
    result = EnumerationResult(n, g, mode, bound, [t for b in branches for t in b])
    if n <= 2:
        result.warning = "n <= 2: the lambda lemmas do not apply; bound evaluated arithmetically only"
        log.warning(result.warning)
    return result


def moduli_dimension(n: int, g: int) -> int:
    """Dimension of the space of tangential covers of degree ``n``: ``(n^2 - 1)(g - 1) - 1``."""
    if n <= 2:
        raise ValueError("dimension formula holds only for n > 2")
    if g < 2:
        raise ValueError("base curve must have genus >= 2")
    return (n * n - 1) * (g - 1) - 1


def rigidity_constant() -> int:
    """Dimension of the linear system ``|lambda(n, mu)|``.

    A rational curve with ``C . K = 0`` admits no deformations, so each
    system is a single point.  Reported, not derived here.
    """
    return 0


def finiteness_summary(n: int, g: int, workers: int = 1) -> dict:
    types = enumerate_cover_types(n, g, "ordered", workers=workers)
    rigid = rigidity_constant()
    return {
        "n": n,
        "g": g,
        "moduli_dimension": moduli_dimension(n, g),
        "admissible_types": types.count,
        "linear_system_dimension": rigid,
        # each admissible type contributes a 0-dimensional system
        "isolated_points": types.count if rigid == 0 else None,
    }


@dataclass(frozen=True)
class TypeVerification:
    """All per-type checks for one ``(n, g, mu)``."""

    mu: tuple[int, ...]
    dot_k: VerificationReport
    self_: VerificationReport
    pullback: PullbackReport
    genus: int

    @property
    def match(self) -> bool:
        return self.dot_k.match and self.self_.match and self.pullback.match

    def to_json(self) -> dict:
        return {
            "mu": list(self.mu),
            "lambda_dot_K": self.dot_k.to_json(),
            "lambda_self": self.self_.to_json(),
            "pullback": self.pullback.to_json(),
            "genus": self.genus,
            "match": self.match,
        }


def verify_type(model: QuotientCoverModel, n: int, mu) -> TypeVerification:
    """Run every per-type check; used by the CLI sweep and the acceptance suite."""
    return TypeVerification(
        _entries(mu),
        check_lambda_dot_K(model, n, mu),
        check_lambda_self(model, n, mu),
        verify_lambda_pullback(model, n, mu),
        genus_lambda(model, n, mu),
    )


def _verify_chunk(args) -> tuple[int, list[dict]]:
    n, g, chunk = args
    model = build_quotient_model(g)
    failures = []
    for t in chunk:
        r = verify_type(model, n, t)
        if not r.match:
            failures.append(r.to_json())
    return len(chunk), failures


def verify_sweep(n: int, g: int, types: Sequence[Sequence[int]], workers: int = 1) -> tuple[int, list[dict]]:
    """Verify every type in ``types``; returns ``(checked, failure reports)`` in input order."""
    types = [tuple(t) for t in types]
    if workers > 1 and len(types) > 2000:
        size = -(-len(types) // (workers * 4))
        chunks = [(n, g, types[k:k + size]) for k in range(0, len(types), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_verify_chunk, chunks))
    else:
        parts = [_verify_chunk((n, g, types))]
    return sum(c for c, _ in parts), [f for _, fs in parts for f in fs]
