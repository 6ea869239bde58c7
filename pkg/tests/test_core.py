import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from su11wigner.core import (
    DecomposedState,
    DiskPoint,
    HalfInteger,
    HyperboloidPoint,
    IrrepBlock,
    SqueezeParameter,
    TwoModeState,
    disk_to_hyperboloid,
    exact_phase,
    hyperboloid_to_disk,
    minkowski_vector,
)

disk_xi = st.complex_numbers(max_magnitude=0.999, allow_nan=False, allow_infinity=False)


class TestHalfInteger:
    @pytest.mark.parametrize(
        "value,twice",
        [(1, 2), ("1/2", 1), ("3/2", 3), ("1.5", 3), (Fraction(5, 2), 5), (2.5, 5), (" 7 / 2 ", 7), ("-1/2", -1)],
    )
    def test_parse(self, value, twice):
        assert HalfInteger.of(value).twice == twice

    @pytest.mark.parametrize("bad", ["1/3", "abc", "", 0.3, "2/4x"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            HalfInteger.of(bad)

    def test_bool_rejected(self):
        with pytest.raises(TypeError):
            HalfInteger.of(True)

    def test_arithmetic_and_order(self):
        a, b = HalfInteger.of("1/2"), HalfInteger.of("3/2")
        assert a + 1 == b and b - a == HalfInteger(2) and 2 - a == b and -a == HalfInteger(-1)
        assert a < b and float(b) == 1.5
        assert str(a) == "1/2" and str(HalfInteger(4)) == "2"
        assert HalfInteger(4).is_integer and not a.is_integer

    @given(st.integers(-50, 50))
    def test_phase_is_exact(self, tw):
        ph = HalfInteger(tw).phase()
        assert ph in (1, 1j, -1, -1j)
        assert ph == exact_phase(tw)
        assert abs(ph - complex(math.cos(math.pi * tw / 2), math.sin(math.pi * tw / 2))) < 1e-12


class TestCoordinates:
    def test_examples(self):
        assert disk_to_hyperboloid(DiskPoint(0)) == HyperboloidPoint(0.0, 0.0)
        p = disk_to_hyperboloid(DiskPoint(0.485))
        assert p.tau == pytest.approx(2 * math.atanh(0.485), rel=1e-15) and p.chi == 0.0
        p = disk_to_hyperboloid(DiskPoint(0.5j))
        assert p.tau == pytest.approx(2 * math.atanh(0.5)) and p.chi == pytest.approx(math.pi / 2)
        assert hyperboloid_to_disk(HyperboloidPoint(0.0, 1.3)).xi == 0
        assert hyperboloid_to_disk(HyperboloidPoint(2.0, 0.0)).xi == pytest.approx(math.tanh(1.0))
        assert minkowski_vector(HyperboloidPoint(0, 0)) == (1.0, 0.0, 0.0)
        v = minkowski_vector(HyperboloidPoint(1.0, math.pi / 2))
        assert v == pytest.approx((math.cosh(1), 0.0, math.sinh(1)), abs=1e-15)

    def test_chi_canonical(self):
        assert HyperboloidPoint(1.0, 3 * math.pi).chi == pytest.approx(math.pi)
        assert HyperboloidPoint(1.0, -math.pi).chi == pytest.approx(math.pi)
        assert HyperboloidPoint(0.0, 2.0).chi == 0.0

    @pytest.mark.parametrize("bad", [1.0, 1.5j, complex("nan")])
    def test_disk_rejects(self, bad):
        with pytest.raises(ValueError):
            DiskPoint(bad)

    def test_hyperboloid_rejects(self):
        with pytest.raises(ValueError):
            HyperboloidPoint(-0.1, 0.0)
        with pytest.raises(ValueError):
            HyperboloidPoint(float("inf"), 0.0)

    @given(disk_xi)
    def test_round_trip(self, xi):
        back = hyperboloid_to_disk(disk_to_hyperboloid(DiskPoint(xi))).xi
        assert abs(back - xi) <= 1e-12

    @given(st.floats(0, 15), st.floats(-10, 10))
    def test_minkowski_norm(self, tau, chi):
        x0, x1, x2 = minkowski_vector(HyperboloidPoint(tau, chi))
        assert x0 > 0
        assert abs(x0 * x0 - x1 * x1 - x2 * x2 - 1.0) <= 1e-10 * x0 * x0

    @given(st.floats(0, 10), st.floats(-3, 3))
    def test_squeeze_round_trip(self, tau, chi):
        p = HyperboloidPoint(tau, chi)
        q = SqueezeParameter.from_point(p).to_point()
        assert q.tau == pytest.approx(p.tau, abs=1e-12)
        if tau > 1e-6:
            assert abs(complex(math.cos(q.chi), math.sin(q.chi)) - complex(math.cos(p.chi), math.sin(p.chi))) < 1e-9


class TestStateTypes:
    def test_two_mode_state_properties(self):
        amps = np.zeros((3, 4), dtype=complex)
        amps[0, 0] = 0.6
        amps[2, 1] = 0.8
        s = TwoModeState(amps)
        assert (s.cutoff_a, s.cutoff_b, s.cutoff) == (2, 3, 3)
        assert s.boundary_mass == pytest.approx(0.64)
        assert s.tail_warning
        assert s.metadata()["cutoffs"] == [2, 3]
        with pytest.raises(ValueError):
            s.amplitudes[0, 0] = 1.0

    def test_norm_checked(self):
        with pytest.raises(ValueError):
            TwoModeState(np.ones((2, 2)))
        assert TwoModeState(np.zeros((2, 2))).is_empty

    def test_rejects_bad_arrays(self):
        with pytest.raises(ValueError):
            TwoModeState(np.ones(3) / math.sqrt(3))
        with pytest.raises(ValueError):
            TwoModeState(np.array([[np.nan]]))

    def test_irrep_block(self):
        b = IrrepBlock("3/2", np.array([[0.6, 0], [0, 0.8]]), (2, -2))
        assert b.copies == 2 and b.mu_count == 2 and b.norm_squared == pytest.approx(1.0)
        assert b.mu(1) == HalfInteger(5)
        with pytest.raises(ValueError):
            IrrepBlock("3/2", np.ones((1, 2)), (1,))
        with pytest.raises(ValueError):
            IrrepBlock("0", np.ones(2))

    def test_decomposed_order(self):
        a = IrrepBlock("1/2", np.ones(1))
        b = IrrepBlock("1", np.ones(1))
        assert len(DecomposedState((a, b))) == 2
        with pytest.raises(ValueError):
            DecomposedState((b, a))
        with pytest.raises(ValueError):
            DecomposedState((a, a))
