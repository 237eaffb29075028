import json

import numpy as np
import pytest

from momentvar import catalog
from momentvar.algebra import (
    AlgebraJSONError,
    AlgebraTensor,
    act_group,
    act_lie,
    direct_sum,
    dumps,
    from_json_dict,
    inner_product,
    is_associative,
    loads,
    random_unitary,
    to_json_dict,
)
from momentvar.moment import critical_test

from conftest import catalog_entries, random_tensor


def test_tensor_validation():
    with pytest.raises(ValueError):
        AlgebraTensor(2, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        AlgebraTensor(2, np.full((2, 2, 2), np.nan))
    mu = catalog.catalog_get("d5", dim=2).tensor
    with pytest.raises(ValueError):
        mu.c[0, 0, 0] = 5.0  # frozen


def test_act_group_identity_and_scaling(rng):
    mu = random_tensor(3, rng)
    assert np.allclose(act_group(np.eye(3), mu).c, mu.c)
    for t in (2.0, 0.3, 5.0):
        scaled = act_group(t * np.eye(3), mu)
        assert np.isclose(scaled.norm, mu.norm / t)


def test_act_group_d21_metric_pullback():
    # diag(1/a, 1, 1) turns the relations into (a^2, a, -a) on the new frame.
    d21 = catalog.catalog_get("d21", dim=3).tensor
    a = 1.7
    moved = act_group(np.diag([1.0 / a, 1.0, 1.0]), d21)
    expected = np.zeros((3, 3, 3), dtype=complex)
    expected[0, 0, 2] = a * a
    expected[0, 1, 2] = a
    expected[1, 0, 2] = -a
    assert np.allclose(moved.c, expected)


def test_act_group_errors(rng):
    mu = random_tensor(2, rng)
    with pytest.raises(ValueError):
        act_group(np.zeros((2, 2)), mu)
    with pytest.raises(ValueError):
        act_group(np.eye(3), mu)


def test_act_lie_identity_is_minus_mu(rng):
    for n in (2, 3, 4):
        mu = random_tensor(n, rng)
        assert np.array_equal(act_lie(np.eye(n), mu).c, -mu.c)


def test_act_lie_derivation_annihilates():
    d1 = catalog.catalog_get("d1", dim=2).tensor
    assert act_lie(np.diag([0.0, 2.0]), d1).norm <= 1e-14


def test_act_lie_single_matrix_unit():
    # E11 acting on e1 e1 = e2 sends the relation to -2 e2.
    d5 = catalog.catalog_get("d5", dim=2).tensor
    e11 = np.zeros((2, 2))
    e11[0, 0] = 1.0
    moved = act_lie(e11, d5)
    expected = np.zeros((2, 2, 2), dtype=complex)
    expected[0, 0, 1] = -2.0
    assert np.allclose(moved.c, expected)


def test_inner_product_examples():
    d6 = catalog.catalog_get("d6", dim=2).tensor
    assert inner_product(d6, d6) == pytest.approx(3.0)
    zero = AlgebraTensor.zero(2)
    assert inner_product(d6, zero) == 0.0
    d5 = catalog.catalog_get("d5", dim=2).tensor
    d1 = catalog.catalog_get("d1", dim=2).tensor
    assert inner_product(d5, d1) == 0.0
    with pytest.raises(ValueError):
        inner_product(d5, catalog.catalog_get("d1", dim=3).tensor)


def _associator_by_brute_force(mu):
    n = mu.dim
    worst = 0.0
    eye = np.eye(n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                left = mu.product(eye[i], mu.product(eye[j], eye[k]))
                right = mu.product(mu.product(eye[i], eye[j]), eye[k])
                worst = max(worst, float(np.abs(left - right).max()))
    return worst


def test_is_associative_catalog_and_counterexample():
    for entry in catalog_entries():
        check = is_associative(entry.tensor)
        assert check, f"{entry.name}: violation {check.max_violation}"
        assert _associator_by_brute_force(entry.tensor) <= 1e-12
    assert is_associative(AlgebraTensor.zero(3))
    bad = AlgebraTensor.from_terms(2, {(1, 1, 1): 1.0, (1, 1, 2): 1.0, (2, 2, 1): 1.0})
    assert _associator_by_brute_force(bad) > 0.5
    assert not is_associative(bad)


def test_associativity_is_isomorphism_invariant(rng):
    for entry in catalog_entries():
        g = random_unitary(entry.dim, rng)
        moved = act_group(g, entry.tensor).normalized()
        assert is_associative(moved, 1e-9)


def test_direct_sum_builds_table_row():
    line = AlgebraTensor.from_terms(1, {(1, 1, 1): 1.0})
    summed = direct_sum(line, line)
    assert np.allclose(summed.c, catalog.catalog_get("d4", dim=2).tensor.c)
    assert direct_sum(line, AlgebraTensor.zero(0)) is line
    with pytest.raises(ValueError):
        direct_sum(line, line, 0.0)


def test_direct_sum_scaled_criticality():
    # Two critical blocks glued with |t|^2 = c1/c2 stay critical in dim 4.
    d1 = catalog.catalog_get("d1", dim=2).tensor
    d5 = catalog.catalog_get("d5", dim=2).tensor
    c1 = critical_test(d1).c
    c2 = critical_test(d5).c
    t0 = np.sqrt(c1 / c2)
    glued = direct_sum(d1, d5, t0)
    report = critical_test(glued)
    assert report.is_critical
    assert sum(report.type_ds) == 4


def test_json_round_trip_and_examples():
    d5 = catalog.catalog_get("d5", dim=2).tensor
    parsed = from_json_dict({"dim": 2, "terms": [{"i": 1, "j": 1, "k": 2, "c": [1, 0]}]})
    assert np.allclose(parsed.c, d5.c)
    d22 = from_json_dict({"dim": 3, "terms": [
        {"i": 1, "j": 2, "k": 3, "c": [1, 0]}, {"i": 2, "j": 1, "k": 3, "c": [1, 0]}]})
    assert np.allclose(d22.c, catalog.d22(1, 1).c)
    for entry in catalog_entries():
        again = loads(dumps(entry.tensor))
        assert np.allclose(again.c, entry.tensor.c)


@pytest.mark.parametrize("doc", [
    "[]",
    '{"dim": 2}',
    '{"dim": 2, "terms": [{"i": 1, "j": 1, "k": 3, "c": [1, 0]}]}',
    '{"dim": 2, "terms": [{"i": 0, "j": 1, "k": 1, "c": [1, 0]}]}',
    '{"dim": 2, "terms": [{"i": 1, "j": 1, "k": 1, "c": [1, 0]},'
    ' {"i": 1, "j": 1, "k": 1, "c": [2, 0]}]}',
    '{"dim": 2, "terms": [{"i": 1, "j": 1, "c": [1, 0]}]}',
    "not json",
])
def test_json_errors(doc):
    with pytest.raises(AlgebraJSONError):
        loads(doc)


def test_json_complex_pairs():
    mu = catalog.d22(1j, 2.0)
    doc = json.loads(dumps(mu))
    coeffs = {(t["i"], t["j"], t["k"]): complex(*t["c"]) for t in doc["terms"]}
    assert coeffs[(1, 2, 3)] == 1j and coeffs[(2, 1, 3)] == 2.0
    assert np.allclose(from_json_dict(to_json_dict(mu)).c, mu.c)


def test_group_action_compatibility(rng):
    mu = random_tensor(3, rng)
    for _ in range(20):
        g = random_unitary(3, rng)
        h = random_unitary(3, rng)
        lhs = act_group(g @ h, mu)
        rhs = act_group(g, act_group(h, mu))
        assert np.linalg.norm(lhs.c - rhs.c) <= 1e-10 * mu.norm


def test_metric_unitary_invariance(rng):
    mu = random_tensor(3, rng)
    lam = random_tensor(3, rng)
    for _ in range(20):
        k = random_unitary(3, rng)
        moved = inner_product(act_group(k, mu), act_group(k, lam))
        assert abs(moved - inner_product(mu, lam)) <= 1e-10 * mu.norm * lam.norm


def _small_expm(a, order=24):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, order):
        term = term @ a / k
        out = out + term
    return out


def test_act_lie_matches_group_derivative(rng):
    for n in (2, 3):
        mu = random_tensor(n, rng).normalized()
        for _ in range(10):
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            t = 1e-5
            plus = act_group(_small_expm(t * a), mu)
            minus = act_group(_small_expm(-t * a), mu)
            fd = (plus.c - minus.c) / (2 * t)
            exact = act_lie(a, mu).c
            denom = max(np.linalg.norm(exact), 1.0)
            assert np.linalg.norm(fd - exact) / denom <= 1e-6
