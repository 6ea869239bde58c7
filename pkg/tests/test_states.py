import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from su11wigner.core import HalfInteger
from su11wigner.states import (
    StateSpec,
    build_coherent_squeezed,
    build_raw,
    build_state,
    build_su11_coherent,
    build_tmsv,
    decompose,
    recompose,
    su11_coherent_state,
)


def test_tmsv_amplitudes():
    s = build_tmsv(0.485)
    c00 = math.sqrt(1 - 0.485**2)
    assert s.amplitudes[0, 0] == pytest.approx(c00, abs=1e-14)
    assert s.amplitudes[1, 1] == pytest.approx(c00 * 0.485, abs=1e-14)
    off = s.amplitudes - np.diag(np.diag(s.amplitudes))
    assert not off.any()


def test_tmsv_vacuum():
    s = build_tmsv(0.0)
    assert s.amplitudes[0, 0] == 1 and s.norm_squared == 1


@given(st.complex_numbers(max_magnitude=0.6, allow_nan=False))
def test_tmsv_truncation_small(xi):
    s = build_tmsv(xi)
    assert s.truncation_loss < 1e-12
    assert not s.tail_warning


def test_coherent_squeezed_vacuum_and_parity():
    s = build_coherent_squeezed(0, 0, cutoff=5)
    assert s.amplitudes[0, 0] == 1 and s.norm_squared == pytest.approx(1.0)
    s = build_coherent_squeezed(0.0, 0.6 + 0.2j, cutoff=(0, 40))
    assert np.all(s.amplitudes[:, 1::2] == 0)


def test_coherent_squeezed_factorizes():
    s = build_coherent_squeezed(0.7, 0.5 + 0.2j, cutoff=(25, 40))
    u, sv, vh = np.linalg.svd(s.amplitudes)
    assert sv[1] < 1e-12 * sv[0]
    assert s.provenance["methods"] == ["expm", "expm"]


def test_coherent_squeezed_auto_cutoff():
    s = build_coherent_squeezed(1.0, 4 + 0.5j, cutoff="auto")
    assert not s.tail_warning
    assert s.provenance["methods"][1] == "series"
    assert s.cutoff_b > 10_000
    warned = build_coherent_squeezed(1.0, 4 + 0.5j)
    assert warned.tail_warning


def test_coherent_squeezed_rejects():
    with pytest.raises(ValueError):
        build_coherent_squeezed(1, 0.1, method="magic")
    with pytest.raises(ValueError):
        build_coherent_squeezed(1, 0.1, cutoff=(-1, 3))


def test_su11_coherent_half_is_tmsv():
    a = decompose(su11_coherent_state("1/2", 0.485)).blocks[0].psi
    b = decompose(build_tmsv(0.485)).blocks[0].psi
    n = min(a.shape[1], b.shape[1])
    np.testing.assert_allclose(a[:, :n], b[:, :n], atol=1e-10)


def test_su11_coherent_trivial_and_decay():
    dec = build_su11_coherent(2, 0.0)
    assert len(dec) == 1 and dec.blocks[0].psi[0, 0] == pytest.approx(1.0)
    assert np.abs(dec.blocks[0].psi[0, 1:]).max() < 1e-14
    psi = build_su11_coherent(1, 0.3 * cmath.exp(0.4j)).blocks[0].psi[0]
    p = np.abs(psi[:9]) ** 2
    ratios = p[1:] / p[:-1]
    # |Psi_mu|^2 ~ (n + 1) |xi|^{2n} for k = 1, so the ratio tends to |xi|^2
    expected = [(n + 2) / (n + 1) * 0.09 for n in range(8)]
    np.testing.assert_allclose(ratios, expected, rtol=1e-8)


def test_su11_coherent_rejects():
    with pytest.raises(ValueError):
        su11_coherent_state(1, 1.2)
    with pytest.raises(ValueError):
        su11_coherent_state(5, 0.2, cutoff=3)


def test_decompose_examples():
    dec = decompose(build_raw([(0, 0, 1.0)]))
    assert [str(b.k) for b in dec] == ["1/2"] and dec.blocks[0].psi[0, 0] == 1
    dec = decompose(build_raw([(2, 1, 1.0)]))
    b = dec.blocks[0]
    assert b.k == HalfInteger.of(1) and b.mu(int(np.argmax(np.abs(b.psi[0])))) == HalfInteger(4)
    assert b.differences == (1,)


def test_decompose_tmsv_single_block():
    s = build_tmsv(0.3)
    dec = decompose(s)
    assert len(dec) == 1
    np.testing.assert_array_equal(dec.blocks[0].psi[0], np.diag(s.amplitudes))


raw_entries = st.lists(
    st.tuples(st.integers(0, 6), st.integers(0, 6), st.complex_numbers(max_magnitude=1, allow_nan=False)),
    min_size=1,
    max_size=12,
)


def _normalized(entries):
    s = build_raw(entries, tol_norm=1e300)
    n = math.sqrt(s.norm_squared)
    if n == 0:
        return None
    return build_raw([(a, b, c / n) for a, b, c in entries]) if n else None


@given(raw_entries)
def test_sector_fold_round_trip(entries):
    s = _normalized(entries)
    if s is None:
        return
    dec = decompose(s)
    assert dec.norm_squared == pytest.approx(s.norm_squared, rel=1e-12)
    back = recompose(dec, s.amplitudes.shape)
    np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-15)
    ks = [b.k for b in dec]
    assert ks == sorted(set(ks))


@given(raw_entries)
def test_other_folds(entries):
    s = _normalized(entries)
    if s is None:
        return
    sym = decompose(s, fold="symmetric")
    up = decompose(s, fold="upper")
    lower_mass = float(np.sum(np.abs(np.triu(s.amplitudes, 1)) ** 2))
    assert up.norm_squared + up.metadata["discarded_mass"] == pytest.approx(s.norm_squared, rel=1e-12)
    assert up.metadata["discarded_mass"] == pytest.approx(lower_mass, abs=1e-14)
    assert all(b.copies == 1 for b in sym)
    with pytest.raises(ValueError):
        recompose(sym)


def test_bad_fold():
    with pytest.raises(ValueError):
        decompose(build_tmsv(0.1), fold="diagonal")


def test_empty_state():
    s = build_raw([])
    assert s.is_empty and len(decompose(s)) == 0


def test_state_spec_dispatch():
    s = build_state(StateSpec("tmsv", {"xi": 0.2}, 20))
    assert s.cutoff == 20
    s = build_state(StateSpec("su11_coherent", {"k": "3/2", "xi": 0.1j}))
    assert s.provenance["gate"]["passed"]
    s = build_state(StateSpec("coherent_times_squeezed", {"alpha": 0.3, "xi": 0.2}, [6, 8]))
    assert (s.cutoff_a, s.cutoff_b) == (6, 8)
    with pytest.raises(ValueError):
        StateSpec("cat", {})
    with pytest.raises(ValueError):
        StateSpec("tmsv", {"xi": 1.0})
