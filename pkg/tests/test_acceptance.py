"""Acceptance criteria 1-9, all exact.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

import random
from fractions import Fraction

import pytest

from hhtlattice.cocycle import ONE, transition_matrix, verify_cocycle
from hhtlattice.cover import (
    C0_DAG,
    C1_DAG,
    F_DAG,
    build_quotient_model,
    dagger_intersect,
    dagger_pullback,
    r_dag,
    s_dag,
    verify_canonical_pullback,
)
from hhtlattice.lattice import blow_up, intersect, make_ruled_surface
from hhtlattice.theorems import (
    check_lambda_dot_K,
    check_lambda_self,
    enumerate_cover_types,
    genus_lambda,
    is_admissible,
    moduli_dimension,
    verify_type,
)

import oracles

SWEEP = [(n, g) for n in (3, 4, 5, 6) for g in (2, 3)]
SEED = 20261016
CASES = 1000


@pytest.fixture(scope="session")
def sweep():
    """Every admissible type of the sweep, verified once and shared by 1-4."""
    out = {}
    for n, g in SWEEP:
        model = build_quotient_model(g)
        types = enumerate_cover_types(n, g).types
        out[n, g] = [verify_type(model, n, mu) for mu in types]
    return out


def _mu2(mu):
    return sum(m * m for m in mu)


@pytest.mark.criterion(1)
@pytest.mark.parametrize("n, g", SWEEP)
def test_lambda_dot_K(sweep, n, g):
    d = n * (2 * g - 2)
    bad = [
        r.mu for r in sweep[n, g]
        if not (r.dot_k.computed == 0 and r.dot_k.chain == (d, -2 * d, d) and r.dot_k.match)
    ]
    assert sweep[n, g] and bad == []


@pytest.mark.criterion(2)
@pytest.mark.parametrize("n, g", SWEEP)
def test_lambda_self(sweep, n, g):
    bad = [
        r.mu for r in sweep[n, g]
        if not (r.self_.computed == Fraction(n * n * (2 * g - 2) - _mu2(r.mu), 2) and r.self_.match)
    ]
    assert bad == []


@pytest.mark.criterion(2)
def test_lambda_self_against_dense_oracle():
    rng = random.Random(SEED)
    for n, g in SWEEP:
        model = build_quotient_model(g)
        form = oracles.dense_top_form(g)
        types = enumerate_cover_types(n, g).types
        for mu in rng.sample(types, min(25, len(types))):
            v = oracles.defining_rhs(g, n, mu)
            assert check_lambda_self(model, n, mu).computed == oracles.dense_pair(form, v, v) / 2
            k = oracles.canonical_pullback(g)
            assert check_lambda_dot_K(model, n, mu).computed == oracles.dense_pair(form, v, k) / 2 == 0


@pytest.mark.criterion(3)
@pytest.mark.parametrize("n, g", SWEEP)
def test_genus_closed_form(sweep, n, g):
    bad = [
        r.mu for r in sweep[n, g]
        if Fraction(r.genus) != 1 + Fraction(n * n * (2 * g - 2) - _mu2(r.mu), 4) or r.genus < 0
    ]
    assert bad == []


@pytest.mark.criterion(3)
@pytest.mark.parametrize("n, g", SWEEP)
def test_admissible_iff_genus_nonnegative(sweep, n, g):
    # every admissible type plus the adapted types one step (mu_i + 2) outside it
    model = build_quotient_model(g)
    admissible = {r.mu for r in sweep[n, g]}
    outside = {
        mu[:i] + (mu[i] + 2,) + mu[i + 1:]
        for mu in admissible for i in range(len(mu))
    } - admissible
    assert outside
    for mu in admissible:
        assert is_admissible(n, g, mu)
    for mu in outside:
        assert not is_admissible(n, g, mu)
        assert genus_lambda(model, n, mu) < 0
        assert genus_lambda(model, n, mu) == 1 + Fraction(n * n * (2 * g - 2) - _mu2(mu), 4)


@pytest.mark.criterion(3)
def test_genus_equality_case():
    mu = (3, 3, 1, 1, 1, 1)
    assert _mu2(mu) == 9 * 2 + 4
    assert genus_lambda(build_quotient_model(2), 3, mu) == 0
    assert is_admissible(3, 2, mu)


@pytest.mark.criterion(4)
@pytest.mark.parametrize("n, g", SWEEP)
def test_defining_equation(sweep, n, g):
    bad = [
        r.mu for r in sweep[n, g]
        if not (r.pullback.match and list(r.pullback.lhs.coeffs) == oracles.defining_rhs(g, n, r.mu))
    ]
    assert bad == []


@pytest.mark.criterion(5)
@pytest.mark.parametrize("g", [2, 3, 4])
def test_canonical_pullback(g):
    model = build_quotient_model(g)
    report = verify_canonical_pullback(model)
    assert report.match
    assert report.lhs == report.rhs == model.bl_prime(model.tilde.canonical)
    assert list(report.rhs.coeffs) == oracles.canonical_pullback(g)


@pytest.mark.criterion(6)
def test_enumeration_3_2():
    oracle = oracles.brute_force_types(3, 2)
    assert len(oracle) == 22
    assert len({tuple(sorted(t)) for t in oracle}) == 3
    assert enumerate_cover_types(3, 2).types == oracle
    assert enumerate_cover_types(3, 2, "multiset").count == 3


@pytest.mark.criterion(6)
def test_enumeration_4_2():
    oracle = oracles.brute_force_types(4, 2)
    assert len(oracle) == 337
    r = enumerate_cover_types(4, 2)
    assert r.count == 337 and r.types == oracle


@pytest.mark.criterion(7)
@pytest.mark.parametrize("n, g, d", [(3, 2, 7), (4, 2, 14), (3, 3, 15)])
def test_moduli_dimension(n, g, d):
    assert moduli_dimension(n, g) == d == (n * n - 1) * (g - 1) - 1


COCYCLE_KINDS = ["rank2"] + [f"affine({g})" for g in (1, 2, 3, 4)]


@pytest.mark.criterion(8)
@pytest.mark.parametrize("kind", COCYCLE_KINDS)
@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_cocycle(m, kind):
    report = verify_cocycle(m, kind)
    assert report.ok, report.failures
    assert report.triples_checked == m ** 3
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            assert transition_matrix(i, j, kind).det() == ONE


def _random_class(rng, surface, lo=-9, hi=9):
    return surface.divisor({b: rng.randint(lo, hi) for b in surface.basis})


@pytest.mark.criterion(9)
def test_pairing_bilinear_symmetric():
    rng = random.Random(SEED)
    for _ in range(CASES):
        top = build_quotient_model(rng.randint(2, 4)).top
        A, B, C = (_random_class(rng, top) for _ in range(3))
        a, b = rng.randint(-20, 20), rng.randint(-20, 20)
        assert intersect(a * A + b * B, C) == a * intersect(A, C) + b * intersect(B, C)
        assert intersect(C, a * A + b * B) == a * intersect(C, A) + b * intersect(C, B)
        assert intersect(A, B) == intersect(B, A)


@pytest.mark.criterion(9)
def test_blow_up_isometry():
    rng = random.Random(SEED + 1)
    for _ in range(CASES):
        g = rng.randint(2, 4)
        S = make_ruled_surface(g)
        k = rng.randint(0, 8)
        T, bl = blow_up(S, [f"p{i}" for i in range(k)])
        A, B = _random_class(rng, S), _random_class(rng, S)
        assert intersect(bl(A), bl(B)) == intersect(A, B)
        assert all(intersect(bl(A), T.cls(f"p{i}")) == 0 for i in range(k))
        model = build_quotient_model(g)
        X, Y = _random_class(rng, model.tilde), _random_class(rng, model.tilde)
        assert intersect(model.bl_prime(X), model.bl_prime(Y)) == intersect(X, Y)


@pytest.mark.criterion(9)
def test_adjunction_integrality():
    rng = random.Random(SEED + 2)
    for _ in range(CASES):
        model = build_quotient_model(rng.randint(2, 4))
        surface = rng.choice([model.base, model.tilde, model.top])
        D = _random_class(rng, surface)
        assert (intersect(D, D) + intersect(surface.canonical, D)) % 2 == 0


@pytest.mark.criterion(9)
def test_C1_generator_relation():
    rng = random.Random(SEED + 3)
    half = Fraction(1, 2)
    for _ in range(CASES):
        g = rng.randint(2, 4)
        model = build_quotient_model(g)
        k = 2 * g + 2
        a = rng.randint(-9, 9)
        rest = {C0_DAG: rng.randint(-9, 9), F_DAG: rng.randint(-9, 9)}
        rest |= {s_dag(i): rng.randint(-9, 9) for i in range(1, k + 1)}
        rest |= {r_dag(i): rng.randint(-9, 9) for i in range(1, k + 1)}
        with_c1 = model.dagger({C1_DAG: a, **rest})
        rewritten = dict(rest)
        rewritten[C0_DAG] += a
        rewritten[F_DAG] += a
        for i in range(1, k + 1):
            rewritten[s_dag(i)] += a * half
            rewritten[r_dag(i)] -= a * half
        rewritten = model.dagger(rewritten)
        assert dagger_pullback(model, with_c1) == dagger_pullback(model, rewritten)
        other = model.dagger({name: rng.randint(-5, 5) for name in (C0_DAG, F_DAG, C1_DAG)})
        assert dagger_intersect(model, with_c1, other) == dagger_intersect(model, rewritten, other)
