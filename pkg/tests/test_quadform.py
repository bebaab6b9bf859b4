import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import exact_form_value
from pseudospec.errors import DimensionError, InputError, SingularityError
from pseudospec.quadform import (
    QuadraticForm,
    Signature,
    convergents,
    deformed_form,
    evaluate,
    integer_proportionality,
    signature,
    standard_form,
)

small_ints = st.integers(-20, 20)


def test_evaluate_hand_value():
    assert evaluate(standard_form(Signature(1, 1)), [3, 2]) == 5.0


def test_evaluate_zero_vector():
    assert evaluate(standard_form(Signature(2, 3)), [0] * 5) == 0.0


def test_evaluate_dimension_mismatch_names_both():
    with pytest.raises(DimensionError, match="3.*2"):
        evaluate(standard_form(Signature(1, 1)), [1, 2, 3])


def test_evaluate_rejects_fractional_point():
    with pytest.raises(InputError):
        evaluate(standard_form(Signature(2, 0)), [0.5, 1.0])


def test_evaluate_matches_congruence_oracle(rng):
    for _ in range(20):
        g = rng.standard_normal((3, 3)) + 2 * np.eye(3)
        form = deformed_form(g, Signature(2, 1))
        m = rng.integers(-5, 6, size=3)
        expect = float(exact_form_value(g, 2, m))
        got = evaluate(form, m)
        assert got == pytest.approx(expect, rel=1e-10, abs=1e-12)


def test_symmetrized_on_construction():
    S = np.array([[1.0, 2.0], [2.0 + 1e-14, -1.0]])
    form = QuadraticForm(S)
    assert np.array_equal(form.matrix, form.matrix.T)
    assert not form.matrix.flags.writeable


def test_asymmetric_rejected():
    with pytest.raises(InputError, match="symmetric"):
        QuadraticForm([[1.0, 0.0], [1e-3, 1.0]])


def test_nonfinite_rejected():
    with pytest.raises(InputError):
        QuadraticForm([[np.nan]])


@pytest.mark.parametrize(
    "S, expected",
    [
        (np.diag([1.0, 1.0, -1.0]), (2, 1, 0)),
        (np.zeros((2, 2)), (0, 0, 2)),
        (np.diag([3.0, 0.0, -2.0]), (1, 1, 1)),
    ],
)
def test_signature_examples(S, expected):
    assert tuple(signature(QuadraticForm(S))) == expected


def test_signature_bad_tol():
    with pytest.raises(InputError):
        signature(QuadraticForm(np.eye(2)), tol=0.0)


def test_sylvester_invariance(rng):
    base = standard_form(Signature(1, 2)).matrix
    for _ in range(100):
        P = rng.standard_normal((3, 3))
        if abs(np.linalg.det(P)) < 1e-2:
            continue
        S = P.T @ base @ P
        cond = np.linalg.cond(P) ** 2
        assert signature(QuadraticForm(0.5 * (S + S.T)), tol=1e-12 * cond) == (1, 2, 0)


def test_deformed_identity_is_standard():
    assert deformed_form(np.eye(3), Signature(2, 1)) == standard_form(Signature(2, 1))


def test_deformed_circle_of_length_two():
    form = deformed_form(np.array([[2.0]]), Signature(1, 0))
    assert form.matrix[0, 0] == 0.25


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.0, math.pi / 2, 2.5])
def test_deformed_rotation_invariance(theta):
    c, s = math.cos(theta), math.sin(theta)
    form = deformed_form(np.array([[c, -s], [s, c]]), Signature(2, 0))
    np.testing.assert_allclose(form.matrix, np.eye(2), atol=1e-15)


def test_deformed_reconstructs_standard(rng):
    for _ in range(50):
        g = rng.standard_normal((4, 4))
        S = deformed_form(g, Signature(2, 2)).matrix
        np.testing.assert_allclose(g @ S @ g.T, np.diag([1.0, 1.0, -1.0, -1.0]), atol=1e-9 * np.linalg.cond(g) ** 2)


def test_deformed_rejects_singular():
    with pytest.raises(SingularityError):
        deformed_form(np.array([[1.0, 2.0], [2.0, 4.0]]), Signature(1, 1))


def test_deformed_rejects_degenerate_signature():
    with pytest.raises(InputError):
        deformed_form(np.eye(2), Signature(1, 0, 1))


def test_deformed_rejects_dimension_mismatch():
    with pytest.raises(InputError):
        deformed_form(np.eye(3), Signature(1, 1))


def test_convergents_of_sqrt2():
    fracs = [(c.numerator, c.denominator) for c in convergents(math.sqrt(2), 100)]
    assert fracs == [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70)]


def test_proportionality_trivial():
    cert = integer_proportionality(QuadraticForm(np.diag([1.0, -1.0])))
    assert cert.scale == 1.0
    assert np.array_equal(cert.matrix, np.diag([1, -1]))


def test_proportionality_scaled():
    cert = integer_proportionality(QuadraticForm(3 * np.diag([2.0, -5.0, 1.0])))
    assert cert.scale == pytest.approx(3.0, rel=1e-15)
    assert np.array_equal(cert.matrix, np.diag([2, -5, 1]))


def test_proportionality_irrational_absent():
    form = QuadraticForm(np.diag([1.0, -math.sqrt(2)]))
    assert integer_proportionality(form, search_bound=50, tol=1e-9) is None
    # also absent at the default bound
    assert integer_proportionality(form) is None


def test_proportionality_bad_bound():
    with pytest.raises(InputError):
        integer_proportionality(QuadraticForm(np.eye(2)), search_bound=0)


def test_proportionality_zero_form():
    assert integer_proportionality(QuadraticForm(np.zeros((2, 2)))) is None


int_vectors = st.integers(1, 4).flatmap(lambda n: st.tuples(st.lists(small_ints, min_size=n, max_size=n), st.lists(small_ints, min_size=n, max_size=n), st.just(n)))


@settings(max_examples=60, deadline=None)
@given(int_vectors, st.integers(0, 2**32 - 1))
def test_polarization_identity(vecs, seed):
    a, b, n = vecs
    r = np.random.default_rng(seed)
    M = r.standard_normal((n, n))
    form = QuadraticForm(M + M.T)
    a, b = np.array(a), np.array(b)
    lhs = evaluate(form, a + b) - evaluate(form, a) - evaluate(form, b)
    rhs = 2 * float(a @ form.matrix @ b)
    scale = float(np.abs(form.matrix).sum()) * (np.abs(a).max() + np.abs(b).max() + 1) ** 2
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(
    arrays(np.int64, st.tuples(st.integers(1, 4), st.integers(1, 4)), elements=st.integers(-9, 9)),
    st.floats(1e-3, 1e3),
)
def test_certificate_self_verifies(A, scale):
    n = min(A.shape)
    A = A[:n, :n]
    S = scale * (A + A.T)
    cert = integer_proportionality(QuadraticForm(S))
    if cert is not None:
        assert cert.scale > 0
        assert np.max(np.abs(cert.scale * cert.matrix - S)) <= 1e-9
        assert math.gcd(*[int(v) for v in cert.matrix.ravel()]) == 1
    elif np.any(A + A.T):
        pytest.fail(f"integer form {A + A.T} scaled by {scale} not certified")
