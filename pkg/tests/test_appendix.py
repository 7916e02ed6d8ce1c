import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigenmin import appendix
from eigenmin.appendix import (
    REFERENCE_MATRICES,
    CoeffEntry,
    apply_permutation,
    build_system,
    det_identities,
    skew_reduce,
    system_codes,
)
from eigenmin.diffops import directional_derivative
from eigenmin.errors import ConstraintError
from eigenmin.families import random_family
from eigenmin.fibers import find_zero
from eigenmin.groups import GroupSpec, random_element


def leibniz_det(M):
    """Brute-force determinant oracle."""
    N = M.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(N)):
        inv = sum(1 for i in range(N) for j in range(i + 1, N) if perm[i] > perm[j])
        total += (-1) ** inv * np.prod([M[i, perm[i]] for i in range(N)])
    return total


def random_draw(n, seed):
    rng = np.random.default_rng(seed)
    frame = random_element(GroupSpec("SO", 2 * n), rng.integers(2**32)).real.T
    u = rng.normal(size=2 * n)
    return build_system(n, u / np.linalg.norm(u), frame)


def test_reference_matrices_reproduced():
    assert appendix.reference_mismatches() == {"M2": 0, "M2_reduced": 0, "M3": 0, "M3_reduced": 0}


def test_m2_symbolic_entries():
    u = np.array([0.1, 0.2, 0.3, 0.4])
    sys = build_system(2, u)
    u1, u2, u3, u4 = u
    expected = np.array([[-u4, u3, -u2, u1], [-u2, u1, u4, -u3], [u1, u2, u3, u4], [u3, u4, -u1, -u2]])
    np.testing.assert_array_equal(sys.realize(), expected)
    np.testing.assert_array_equal(system_codes(3), REFERENCE_MATRICES["M3"])


def test_n2_permutation():
    perm, S = skew_reduce(build_system(2))
    assert perm == [4, 2, 1, -3]
    np.testing.assert_array_equal(apply_permutation(system_codes(2), perm), REFERENCE_MATRICES["M2_reduced"])
    np.testing.assert_array_equal(S, -S.T)


@pytest.mark.parametrize("n", range(2, 7))
def test_skew_reduction(n):
    perm, S = skew_reduce(build_system(n))
    reduced = apply_permutation(system_codes(n), perm)
    assert np.all(np.diag(reduced) == 1)
    np.testing.assert_array_equal(S, -S.T)
    assert sorted(abs(p) for p in perm) == list(range(1, 2 * n + 1))


def test_det_examples():
    det_abs, pred, kind = det_identities(build_system(2, [1.0, 0, 0, 0]))
    assert kind == "identity" and det_abs == pytest.approx(1) and pred == pytest.approx(1)
    sys = build_system(2, [1.0, 1.0, 0, 0])
    det_abs, pred, _ = det_identities(sys)
    assert det_abs == pytest.approx(4) and pred == pytest.approx(4)
    assert abs(leibniz_det(sys.realize())) == pytest.approx(4)


@pytest.mark.parametrize("n", [2, 3])
def test_det_identity_random_draws(n):
    for d in range(50):
        sys = random_draw(n, d)
        det_abs, pred, kind = det_identities(sys)
        assert kind == "identity"
        assert abs(det_abs - pred) <= 1e-10 * pred


def test_det_identity_against_leibniz():
    sys = random_draw(3, 99)
    det_abs, pred, _ = det_identities(sys)
    assert abs(abs(leibniz_det(sys.realize())) - pred) <= 1e-10 * pred


@pytest.mark.parametrize("n", range(2, 7))
def test_lower_bound_and_permutation_invariance(n):
    perm, _ = skew_reduce(build_system(n))
    for d in range(50):
        sys = random_draw(n, 1000 * n + d)
        det_abs = abs(np.linalg.det(sys.realize()))
        w1 = abs(sys.components[0])
        assert det_abs >= w1 ** (2 * n) * (1 - 1e-10)
        permuted = abs(np.linalg.det(sys.realize(apply_permutation(sys.codes, perm))))
        assert abs(permuted - det_abs) <= 1e-10 * det_abs


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_reduced_matrix_is_scalar_plus_skew(n, seed):
    sys = random_draw(n, seed)
    perm, _ = skew_reduce(sys)
    R = sys.realize(apply_permutation(sys.codes, perm))
    alpha = sys.components[0]
    S = R - alpha * np.eye(2 * n)
    np.testing.assert_allclose(S, -S.T, atol=1e-14)
    # every eigenvalue of alpha I + S has real part alpha
    np.testing.assert_allclose(np.linalg.eigvals(R).real, alpha, atol=1e-10)


def test_build_system_validation():
    with pytest.raises(ConstraintError):
        build_system(1)
    with pytest.raises(ConstraintError):
        build_system(2, [0.0, 1.0, 0, 0])  # (u, x_1) = 0
    with pytest.raises(ConstraintError):
        build_system(2, [1.0, 0, 0, 0], 2 * np.eye(4))
    with pytest.raises(ConstraintError):
        build_system(2, [1.0, 0, 0])
    with pytest.raises(ConstraintError):
        build_system(2).components


def test_coeff_entry():
    assert CoeffEntry.from_code(-3) == CoeffEntry(-1, 3)
    assert CoeffEntry.from_code(0).code == 0
    with pytest.raises(ConstraintError):
        CoeffEntry(2, 1)
    with pytest.raises(ConstraintError):
        CoeffEntry(0, 1)
    assert build_system(2).M[0][0] == CoeffEntry(-1, 4)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_rows_are_derivatives_at_fiber_points(n):
    """At an SO(2n)/U(n) fibre point with frame x = columns of the group element,
    the first 2(n-1) rows of M_n w are (up to -2 and +2, times the sqrt(2) of the
    normalisation of A) the real derivatives along the p-directions built from
    Y_{1s}; the last two rows are the vanishing real and imaginary parts."""
    fam = random_family("SOU", n, 3)
    fp = find_zero(fam, 0)
    x = fp.p.real
    sys = build_system(n, fam.a.real, x.T)
    w = x.T @ fam.b.real
    Mw = sys.realize() @ w
    assert np.max(np.abs(Mw[-2:])) <= 1e-9
    z = np.zeros((n, n))
    c = 2 * np.sqrt(2)
    for s in range(2, n + 1):
        Y = np.zeros((n, n))
        Y[0, s - 1], Y[s - 1, 0] = 1, -1
        Ya = np.block([[Y, z], [z, -Y]]).astype(complex)
        Yb = np.block([[z, Y], [Y, z]]).astype(complex)
        i = 2 * (s - 2)
        assert directional_derivative(fam.field, fp.p, Ya).real == pytest.approx(-c * Mw[i], abs=1e-10)
        assert directional_derivative(fam.field, fp.p, Yb).real == pytest.approx(c * Mw[i + 1], abs=1e-10)
    # M_n is invertible and w != 0, so the differential cannot vanish
    assert abs(np.linalg.det(sys.realize())) > 0
    assert np.linalg.norm(Mw) > 1e-6
