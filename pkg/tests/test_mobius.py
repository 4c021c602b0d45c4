import cmath

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from multicurves import INF, MobiusMap, mobius_through
from multicurves.errors import DegenerateCurveError, SingularInputError
from multicurves.mobius import align_signs, mobius_through_arrays

W = cmath.exp(2j * cmath.pi / 3)


def test_identity_through_zero_one_inf():
    m = mobius_through((0, 1, INF), (0, 1, INF))
    assert m == MobiusMap.identity()


def test_inversion():
    m = mobius_through((0, 1, INF), (INF, 1, 0))
    for z in (2, 0.5j, -3 + 1j):
        assert m(z) == pytest.approx(1 / z)
    assert cmath.isinf(m(0)) and m(INF) == 0


def test_rotation_through_cube_roots():
    m = mobius_through((1, W, W**2), (W, W**2, 1))
    for z in (0.3, 2j, -1.5 + 0.2j):
        assert m(z) == pytest.approx(W * z, abs=1e-14)


def test_normalization_and_sign():
    m = MobiusMap.from_matrix(-2, 0, 0, -1)
    assert m.a * m.d - m.b * m.c == pytest.approx(1)
    assert m.a.real > 0
    m = MobiusMap.from_matrix(0, -1j, -1j, 0)
    assert m.b.imag > 0 or m.b.real > 0


def test_errors():
    with pytest.raises(DegenerateCurveError):
        mobius_through((0, 0, 1), (0, 1, 2))
    with pytest.raises(DegenerateCurveError):
        mobius_through((0, 1, 2), (INF, INF, 1))
    with pytest.raises(SingularInputError):
        MobiusMap.from_matrix(1, 2, 2, 4)
    with pytest.raises(SingularInputError):
        MobiusMap(0, 1, 1, 0).derivative(0)


cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def _spread(pts):
    return min(abs(pts[i] - pts[j]) for i in range(3) for j in range(i + 1, 3))


@given(cplx, cplx, cplx, cplx, cplx, cplx)
def test_three_point_property(z1, z2, z3, w1, w2, w3):
    assume(_spread((z1, z2, z3)) > 1e-2 and _spread((w1, w2, w3)) > 1e-2)
    m = mobius_through((z1, z2, z3), (w1, w2, w3), check_tol=None)
    for z, w in ((z1, w1), (z2, w2), (z3, w3)):
        assert abs(m(z) - w) <= 1e-8 * max(1, abs(w))
    assert abs(m.a * m.d - m.b * m.c - 1) < 1e-10


@given(cplx, cplx, cplx, cplx)
def test_compose_inverse(a, b, c, z):
    assume(abs(a * 1 - b * c) > 1e-3)
    m = MobiusMap.from_matrix(a, b, c, 1)
    assume(abs(m.c * z + m.d) > 1e-3)
    w = m(z)
    back = m.inverse()(w)
    assert abs(back - z) <= 1e-7 * max(1, abs(z))
    assert m.compose(m.inverse()) == MobiusMap.identity() or np.allclose(m.compose(m.inverse()).matrix, np.eye(2))


def test_arrays_match_scalar():
    r = np.random.default_rng(3)
    z = r.normal(size=(6, 20)) + 1j * r.normal(size=(6, 20))
    a, b, c, d = mobius_through_arrays(*z)
    for k in range(20):
        m = mobius_through(z[:3, k], z[3:, k])
        assert np.allclose([a[k], b[k], c[k], d[k]], [m.a, m.b, m.c, m.d])


def test_align_signs_continuity():
    th = np.linspace(0, 1, 50, endpoint=False)
    a = np.exp(1j * np.pi * th)  # sign ambiguity flips halfway through
    sgn = np.where(np.arange(50) % 3 == 0, -1, 1)
    a2, b2, c2, d2 = align_signs(a * sgn, 0 * th, 0 * th, sgn / a)
    assert np.all(np.abs(np.diff(a2)) < 0.2)
