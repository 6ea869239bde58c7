import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from su11wigner.core import DiskPoint
from su11wigner.geometry import (
    IDENTITY,
    GroupElement,
    compose,
    interferometer_element,
    inverse,
    mobius_apply,
    mobius_apply_inverse,
    mobius_apply_inverse_array,
    su11_element,
)

angles = st.floats(-math.pi, math.pi)
elements = st.builds(su11_element, st.floats(0, 4), angles, angles)
disk_xi = st.complex_numbers(max_magnitude=0.99, allow_nan=False, allow_infinity=False)


def close(g, h, tol=1e-12):
    return abs(g.alpha - h.alpha) <= tol * abs(g.alpha) and abs(g.beta - h.beta) <= tol * max(1.0, abs(g.alpha))


def test_interferometer_examples():
    g = interferometer_element(0.7, 0.3, 0.0)
    assert g.alpha == 1 and g.beta == 0
    g = interferometer_element(0.0, 0.3, 1.1)
    assert g.alpha == pytest.approx(cmath.exp(0.55j), abs=1e-15) and g.beta == 0
    g = interferometer_element(0.5, 0.0, math.pi / 2)
    assert abs(g.determinant - 1.0) <= 1e-14
    assert g.beta == pytest.approx(-1j * math.sin(math.pi / 4) * math.sinh(1.0), abs=1e-15)


def test_interferometer_matches_conjugated_rotation():
    # S R S^dag in the defining 2x2 representation
    gain, pump, phi = 0.4, 0.9, 1.3
    ch, sh = math.cosh(gain), math.sinh(gain)
    s = np.array([[ch, cmath.exp(1j * pump) * sh], [cmath.exp(-1j * pump) * sh, ch]])
    r = np.diag([cmath.exp(0.5j * phi), cmath.exp(-0.5j * phi)])
    m = s @ r @ np.linalg.inv(s)
    g = interferometer_element(gain, pump, phi)
    np.testing.assert_allclose(g.matrix(), m, atol=1e-12)


def test_rejects_bad_determinant():
    with pytest.raises(ValueError):
        GroupElement(1.0, 0.5)
    with pytest.raises(ValueError):
        interferometer_element(-0.1, 0, 0)
    g = GroupElement(1.0 + 1e-11, 0.0)
    assert g.determinant == pytest.approx(1.0, abs=1e-15)


@given(elements)
def test_identity_and_inverse(g):
    assert close(compose(g, IDENTITY), g)
    assert close(compose(IDENTITY, g), g)
    e = compose(g, inverse(g))
    assert abs(e.alpha - 1) <= 1e-12 * abs(g.alpha) ** 2 and abs(e.beta) <= 1e-12 * abs(g.alpha) ** 2


@given(elements, elements, elements)
def test_associativity(a, b, c):
    lhs, rhs = compose(compose(a, b), c), compose(a, compose(b, c))
    scale = abs(a.alpha) * abs(b.alpha) * abs(c.alpha) * 8
    assert abs(lhs.alpha - rhs.alpha) <= 1e-12 * scale and abs(lhs.beta - rhs.beta) <= 1e-12 * scale


@given(elements, disk_xi)
def test_mobius_preserves_disk_and_inverts(g, xi):
    y = mobius_apply_inverse(g, DiskPoint(xi))
    assert abs(y.xi) < 1
    back = mobius_apply(g, y)
    assert abs(back.xi - xi) <= 1e-9 * abs(g.alpha) ** 2


@given(elements, elements, disk_xi)
def test_action_is_a_group_action(g, h, xi):
    y1 = mobius_apply(compose(g, h), DiskPoint(xi)).xi
    y2 = mobius_apply(g, mobius_apply(h, DiskPoint(xi))).xi
    assert abs(y1 - y2) <= 1e-8 * (abs(g.alpha) * abs(h.alpha)) ** 2


@given(angles, disk_xi)
def test_pure_rotation_keeps_modulus(phi, xi):
    g = interferometer_element(0.0, 0.0, phi)
    y = mobius_apply_inverse(g, DiskPoint(xi)).xi
    assert abs(abs(y) - abs(xi)) <= 1e-12
    assert abs(y - cmath.exp(-1j * phi) * xi) <= 1e-12


def test_identity_array_is_copy():
    xi = np.array([0.1, 0.2j])
    out = mobius_apply_inverse_array(IDENTITY, xi)
    assert out is not xi and np.array_equal(out, xi)
