"""Tests for the DCT, atom extraction, refinement and DTW kernels."""

import itertools

import numpy as np
import pytest

from utils.signal import (
    CosineAtom,
    SignalError,
    atom_arrays,
    coeffs_to_atoms,
    dct2,
    dct2_direct,
    dtw,
    refine_atom,
)


def _reconstruct(x):
    n = x.size
    base, amplitude, frequency, phase = atom_arrays(dct2(x), n)
    t = np.arange(n)
    return base + np.cos(2 * np.pi * t[:, None] * frequency + phase) @ amplitude


def _dtw_bruteforce(a, b):
    """Minimum over all monotone warping paths by exhaustive recursion."""
    m, n = len(a), len(b)
    best = {}

    def go(i, j):
        if (i, j) in best:
            return best[(i, j)]
        cost = abs(a[i] - b[j])
        if i == 0 and j == 0:
            result = cost
        else:
            options = []
            if i > 0:
                options.append(go(i - 1, j))
            if j > 0:
                options.append(go(i, j - 1))
            if i > 0 and j > 0:
                options.append(go(i - 1, j - 1))
            result = cost + min(options)
        best[(i, j)] = result
        return result

    return go(m - 1, n - 1)


class TestDct:
    """Tests for the unnormalized DCT-II."""

    def test_constant(self):
        coeffs = dct2(np.full(8, 3.0))
        assert coeffs[0] == pytest.approx(24.0, abs=1e-9)
        np.testing.assert_allclose(coeffs[1:], 0.0, atol=1e-9)

    @pytest.mark.parametrize('n,k0', [(8, 3), (32, 5), (257, 40)])
    def test_basis_vector(self, n, k0):
        x = np.cos(np.pi * k0 * (2 * np.arange(n) + 1) / (2 * n))
        coeffs = dct2(x)
        assert coeffs[k0] == pytest.approx(n / 2, rel=1e-9)
        np.testing.assert_allclose(np.delete(coeffs, k0), 0.0, atol=1e-9)

    @pytest.mark.parametrize('n', [1, 2, 15, 16, 17, 64, 257])
    def test_matches_direct_sum(self, n, rng):
        x = rng.normal(size=n)
        fast = dct2(x)
        direct = dct2_direct(x)
        np.testing.assert_allclose(fast, direct, rtol=1e-9, atol=1e-9 * np.abs(direct).max())

    def test_random_lengths_match_direct_sum(self, rng):
        for n in rng.integers(1, 513, size=200).tolist():
            x = rng.normal(size=n)
            direct = dct2_direct(x)
            np.testing.assert_allclose(dct2(x), direct, rtol=1e-9, atol=1e-9 * max(1.0, np.abs(direct).max()))

    def test_rejects_bad_input(self):
        with pytest.raises(SignalError):
            dct2([])
        with pytest.raises(SignalError):
            dct2([1.0, np.inf])
        with pytest.raises(SignalError):
            dct2(np.zeros((2, 2)))


class TestAtoms:
    """Tests for DCT coefficient to cosine atom mapping."""

    def test_constant_signal(self):
        base, atoms = coeffs_to_atoms(dct2(np.full(10, 4.0)), 10)
        assert base == pytest.approx(4.0)
        assert all(a.amplitude == pytest.approx(0.0, abs=1e-12) for a in atoms)

    def test_bin_zero(self, rng):
        x = rng.normal(size=12)
        _, atoms = coeffs_to_atoms(dct2(x), 12)
        assert atoms[0] == CosineAtom(0.0, 0.0, 0.0)

    def test_mapping(self):
        n = 8
        coeffs = np.zeros(n)
        coeffs[2] = 4.0
        coeffs[3] = -2.0
        base, amplitude, frequency, phase = atom_arrays(coeffs, n)
        assert base == 0.0
        assert amplitude[2] == pytest.approx(1.0)
        assert frequency[2] == pytest.approx(2 / 16)
        assert phase[2] == pytest.approx(np.pi * 2 / 16)
        assert amplitude[3] == pytest.approx(0.5)
        assert phase[3] == pytest.approx(np.pi * 3 / 16 + np.pi)

    @pytest.mark.parametrize('n', [5, 64])
    def test_full_reconstruction(self, n, rng):
        x = rng.normal(size=n)
        assert np.max(np.abs(_reconstruct(x) - x)) < 1e-9

    def test_wrong_length(self):
        with pytest.raises(SignalError):
            atom_arrays(np.zeros(4), 5)


class TestRefineAtom:
    """Tests for least-squares atom refinement."""

    def test_exact_recovery(self):
        t = np.arange(400, dtype=np.float64)
        x = 2.5 * np.cos(2 * np.pi * 0.05 * t + 1.1)
        atom = refine_atom(x, [0.04, 0.05, 0.06])
        assert atom.frequency == 0.05
        assert atom.amplitude == pytest.approx(2.5, rel=1e-9)
        assert atom.phase == pytest.approx(1.1, abs=1e-9)

    def test_phase_wrapped(self):
        t = np.arange(200, dtype=np.float64)
        atom = refine_atom(np.cos(2 * np.pi * 0.1 * t - 0.5), [0.1])
        assert 0.0 <= atom.phase < 2 * np.pi
        assert atom.phase == pytest.approx(2 * np.pi - 0.5, abs=1e-9)

    def test_custom_time_index(self):
        t = np.arange(100, 300, dtype=np.float64)
        x = np.cos(2 * np.pi * 0.125 * t + 0.3)
        atom = refine_atom(x, [0.125], t)
        assert atom.phase == pytest.approx(0.3, abs=1e-9)

    def test_errors(self):
        with pytest.raises(SignalError):
            refine_atom([1.0, 2.0], [])
        with pytest.raises(SignalError):
            refine_atom([1.0, 2.0], [0.1], np.arange(3))


class TestDtw:
    """Tests for dynamic time warping."""

    def test_identical(self, rng):
        a = rng.normal(size=20)
        assert dtw(a, a) == 0.0

    def test_single_cell(self):
        assert dtw([0.0], [5.0]) == 5.0

    def test_warped_copy(self):
        assert dtw([1, 2, 3], [1, 2, 2, 3]) == 0.0

    def test_symmetric(self, rng):
        a, b = rng.normal(size=7), rng.normal(size=11)
        assert dtw(a, b) == pytest.approx(dtw(b, a))

    def test_bounded_by_diagonal(self, rng):
        a, b = rng.normal(size=15), rng.normal(size=15)
        assert dtw(a, b) <= np.abs(a - b).sum() + 1e-12

    def test_matches_exhaustive(self, rng):
        for m, n in itertools.product((1, 2, 4, 6), (1, 3, 5)):
            a, b = rng.normal(size=m), rng.normal(size=n)
            assert dtw(a, b) == pytest.approx(_dtw_bruteforce(a, b), abs=1e-12)

    def test_random_pairs_match_exhaustive(self, rng):
        for _ in range(500):
            m, n = rng.integers(1, 13, size=2).tolist()
            a, b = rng.normal(size=m), rng.normal(size=n)
            assert dtw(a, b) == pytest.approx(_dtw_bruteforce(a, b), rel=1e-12, abs=1e-12)

    def test_empty(self):
        with pytest.raises(SignalError):
            dtw([], [1.0])
