import numpy as np
import pytest

from conftest import fd_jacobian, random_hompoly, random_polymap
from prolongation.symtensor import (
    HomPoly,
    PolyMap,
    contract,
    derive,
    hom_dim,
    jacobian,
    monomial_basis,
    monomial_index,
    polymap_from_json,
    polymap_to_json,
    slot_matrix,
)


def test_monomial_basis_canonical_order():
    assert monomial_basis(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert monomial_basis(3, 1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert monomial_basis(1, 4) == ((4,),)


def test_monomial_basis_rejects_zero_dimension():
    with pytest.raises(ValueError):
        monomial_basis(0, 2)


def test_hom_dim():
    assert hom_dim(2, 2, 1) == 4
    assert hom_dim(3, 3, 2) == 18
    assert hom_dim(5, 7, 0) == 7


def test_derive_examples():
    # p = (x1^2 x2, 0)
    p = HomPoly.zero(2, 2, 3)
    p.coeffs[0, monomial_index(2, 3)[(2, 1)]] = 1.0
    d = derive(p, 0)
    expected = HomPoly.zero(2, 2, 2)
    expected.coeffs[0, monomial_index(2, 2)[(1, 1)]] = 2.0
    assert np.allclose(d.coeffs, expected.coeffs)

    q = HomPoly(1, 1, 2, [[1.0]])  # x1^2 in one variable has no second coordinate
    with pytest.raises(ValueError):
        derive(q, 1)

    univariate = HomPoly.zero(2, 1, 2)
    univariate.coeffs[0, monomial_index(2, 2)[(2, 0)]] = 1.0
    assert derive(univariate, 1).is_zero()


def test_derive_rejects_degree_zero():
    with pytest.raises(ValueError):
        derive(HomPoly.zero(2, 2, 0), 0)


def test_mixed_partials_commute(rng):
    for _ in range(10):
        p = random_hompoly(rng, 3, 2, 4)
        a = derive(derive(p, 0), 2)
        b = derive(derive(p, 2), 0)
        assert np.allclose(a.coeffs, b.coeffs)


def test_contract_examples():
    p = HomPoly(1, 1, 2, [[1.0]])  # x^2
    assert np.allclose(contract(p, [1.0]).coeffs, [[1.0]])

    q = HomPoly.zero(2, 1, 2)  # x1 x2
    q.coeffs[0, monomial_index(2, 2)[(1, 1)]] = 1.0
    c = contract(q, [0.0, 1.0])
    assert np.allclose(c.coeffs[0, monomial_index(2, 1)[(1, 0)]], 0.5)
    assert np.allclose(c.coeffs[0, monomial_index(2, 1)[(0, 1)]], 0.0)


def test_contract_zero_vector_gives_zero(rng):
    p = random_hompoly(rng, 3, 2, 3)
    assert contract(p, np.zeros(3)).is_zero()


def test_contract_is_directional_derivative(rng):
    p = random_hompoly(rng, 3, 2, 3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        assert np.allclose(contract(p, e).coeffs, derive(p, i).coeffs / p.k)


def test_contract_linearity_and_commutation(rng):
    p = random_hompoly(rng, 3, 2, 4)
    x = rng.standard_normal(3)
    y = rng.standard_normal(3)
    a, b = 0.7, -1.3
    lin = contract(p, a * x + b * y)
    combo = a * contract(p, x).coeffs + b * contract(p, y).coeffs
    assert np.allclose(lin.coeffs, combo)
    assert np.allclose(
        contract(contract(p, x), y).coeffs, contract(contract(p, y), x).coeffs
    )


def test_slot_matrix_examples():
    p = HomPoly.zero(2, 2, 2)  # (x1 x2, 0)
    p.coeffs[0, monomial_index(2, 2)[(1, 1)]] = 1.0
    assert np.allclose(slot_matrix(p, (1, 0)), [[0.0, 0.5], [0.0, 0.0]])

    q = HomPoly(2, 1, 2, [[1.0, 0.0, 0.0]])  # x1^2
    assert np.allclose(slot_matrix(q, (1, 0)), [[1.0, 0.0]])

    lin = HomPoly(2, 2, 1, [[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(slot_matrix(lin, (0, 0)), [[1.0, 2.0], [3.0, 4.0]])


def test_slot_matrix_rejects_degree_mismatch():
    p = HomPoly(2, 1, 2, [[1.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        slot_matrix(p, (2, 0))


def test_slot_matrix_matches_iterated_contraction(rng):
    # filling k-1 slots one unit vector at a time leaves a linear map whose
    # matrix must agree with the slot matrix entry for entry
    for k in range(2, 5):
        p = random_hompoly(rng, 3, 2, k)
        for beta in monomial_basis(3, k - 1):
            q = p
            for i, count in enumerate(beta):
                e = np.zeros(3)
                e[i] = 1.0
                for _ in range(count):
                    q = contract(q, e)
            assert np.allclose(slot_matrix(p, beta), q.coeffs, atol=1e-12)


def test_jacobian_of_linear_map_is_its_matrix(rng):
    A = rng.standard_normal((3, 2))
    lin = HomPoly(2, 3, 1, A)
    for _ in range(5):
        x = rng.standard_normal(2)
        assert np.allclose(jacobian(lin, x), A)


def test_jacobian_scalar_square():
    p = HomPoly(1, 1, 2, [[1.0]])
    assert np.allclose(jacobian(p, [3.0]), [[6.0]])


def test_jacobian_matches_finite_differences(rng):
    for _ in range(10):
        F = random_polymap(rng, 3, 2, 3)
        x = rng.standard_normal(3)
        J = jacobian(F, x)
        J_fd = fd_jacobian(F.evaluate, x, 3, 2)
        assert np.linalg.norm(J - J_fd) <= 1e-6 * max(1.0, np.linalg.norm(J))


def test_jacobian_is_degree_times_slot_evaluation(rng):
    # D p(x) h = k T(x, ..., x, h): contract k-1 times at x and compare
    for k in range(1, 5):
        p = random_hompoly(rng, 3, 2, k)
        x = rng.standard_normal(3)
        q = p
        for _ in range(k - 1):
            q = contract(q, x)
        assert np.allclose(jacobian(p, x), k * q.coeffs, atol=1e-12)


def test_polymap_json_round_trip(rng):
    F = random_polymap(rng, 2, 3, 3)
    G = polymap_from_json(polymap_to_json(F))
    for k in F.components:
        assert np.allclose(F.components[k].coeffs, G.components[k].coeffs)
    x = rng.standard_normal(2)
    assert np.allclose(F.evaluate(x), G.evaluate(x))


def test_polymap_json_output_index_is_one_based(rng):
    p = HomPoly.zero(2, 2, 1)
    p.coeffs[1, 0] = 2.5
    data = polymap_to_json(PolyMap(2, 2, {1: p}))
    assert data["terms"] == [
        {"degree": 1, "output": 2, "exponents": [1, 0], "value": 2.5}
    ]


def test_polymap_rejects_malformed_term():
    with pytest.raises(ValueError):
        polymap_from_json(
            {"n": 2, "m": 1, "terms": [
                {"degree": 2, "output": 1, "exponents": [1, 0], "value": 1.0}
            ]}
        )
