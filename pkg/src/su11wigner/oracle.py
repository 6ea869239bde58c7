"""Truncated-Fock ground truth.

Operators are realised on two bosonic modes with ``K+ = a^dag b^dag``,
``K- = a b`` and ``K0 = (N_a + N_b + 1)/2``. The full two-mode matrices are
kept sparse; every SU(1,1) operator preserves ``d = n_a - n_b``, so the heavy
lifting (exponentials, kernels) happens on dense per-sector blocks.

Inside sector ``d`` the Fock state ``|n + max(d,0), n + max(-d,0)>`` is the
irrep vector ``|k, mu>`` with ``k = (|d| + 1)/2`` and ``mu = k + n``. The sector
restriction of ``X = K+ - K-`` is real, antisymmetric and tridiagonal, so
``S(zeta) = e^{i chi K0} exp(r X) e^{-i chi K0}`` with ``zeta = r e^{i chi}`` is
evaluated through one tridiagonal eigendecomposition per sector. That
decomposition is cached and reused for every ``zeta``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .core import HalfInteger, HyperboloidPoint, TwoModeState, exact_phase

__all__ = [
    "TruncationLeakError",
    "LEAK_TOLERANCE",
    "GATE_TOLERANCE",
    "OperatorSet",
    "Sector",
    "build_operators",
    "squeeze_matrix",
    "wigner_kernel_matrix",
    "DisentangledKernelParams",
    "disentangled_kernel_element",
    "GateReport",
    "converge",
    "kernel_elements",
    "fock_wigner",
    "displaced_vacuum",
    "squeezed_vacuum",
    "sector_vectors",
    "assemble_sectors",
]

#: Largest mass allowed on the two outermost levels after a squeeze.
LEAK_TOLERANCE = 1e-8
#: Largest change allowed when the cutoff is doubled.
GATE_TOLERANCE = 1e-8


class TruncationLeakError(RuntimeError):
    """Raised when a truncated computation pushes mass onto the cutoff boundary."""


@dataclass(frozen=True)
class Sector:
    """Dense data for the Fock sector ``n_a - n_b = d`` at a given cutoff.

    Attributes
    ----------
    d : int
        Mode-number difference.
    twice_k : int
        ``2k = |d| + 1``.
    na, nb : ndarray of int
        Fock indices of the sector basis, ordered by ``mu``.
    twice_mu : ndarray of int
        ``2 mu`` for each basis vector.
    k_plus : ndarray
        Dense restriction of ``K+`` (lower bidiagonal).
    eigvals, eigvecs : ndarray
        Eigenpairs of the Hermitian matrix ``-i (K+ - K-)`` on the sector.
    """

    d: int
    twice_k: int
    na: np.ndarray
    nb: np.ndarray
    twice_mu: np.ndarray
    k_plus: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray

    @property
    def size(self) -> int:
        return self.na.shape[0]

    @property
    def mu(self) -> np.ndarray:
        return self.twice_mu / 2.0

    def parity(self) -> np.ndarray:
        """Diagonal of ``exp(i pi K0)``, exact."""
        return np.array([exact_phase(int(t)) for t in self.twice_mu])

    def squeeze(self, zeta: complex) -> np.ndarray:
        """Dense ``S(zeta)`` restricted to the sector."""
        return self.squeeze_rows(zeta, self.size)

    def squeeze_rows(self, zeta: complex, rows: int) -> np.ndarray:
        """First ``rows`` rows of the sector ``S(zeta)``."""
        r, chi = abs(zeta), math.atan2(zeta.imag, zeta.real)
        if r == 0.0:
            return np.eye(rows, self.size, dtype=complex)
        ph = np.exp(1j * chi * self.mu)
        v = self.eigvecs
        core = (v[:rows] * np.exp(1j * r * self.eigvals)) @ v.conj().T
        return ph[:rows, None] * core * ph.conj()[None, :]

    def apply_squeeze(self, zeta: complex, vec: np.ndarray, adjoint: bool = False) -> np.ndarray:
        """``S(zeta) vec`` (or ``S(zeta)^dag vec``) without forming the matrix."""
        r, chi = abs(zeta), math.atan2(zeta.imag, zeta.real)
        if r == 0.0:
            return np.array(vec, dtype=complex)
        ph = np.exp(1j * chi * self.mu)
        v = self.eigvecs
        sign = -1.0 if adjoint else 1.0
        y = v.conj().T @ (ph.conj() * vec)
        y *= np.exp(sign * 1j * r * self.eigvals)
        return ph * (v @ y)


class OperatorSet:
    """Two-mode ladder and SU(1,1) operators at a Fock cutoff ``N`` per mode.

    The basis index of ``|n_a, n_b>`` is ``n_a * (N + 1) + n_b``. The full
    matrices are ``scipy.sparse`` CSR matrices; per-sector dense data comes
    from :meth:`sector` and is memoised.
    """

    def __init__(self, cutoff: int):
        cutoff = int(cutoff)
        if cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {cutoff}")
        self.cutoff = cutoff
        dim1 = cutoff + 1
        lower = sp.diags(np.sqrt(np.arange(1, dim1, dtype=float)), 1, format="csr")
        eye = sp.identity(dim1, format="csr")
        self.a = sp.kron(lower, eye, format="csr")
        self.b = sp.kron(eye, lower, format="csr")
        self.a_dag = self.a.T.tocsr()
        self.b_dag = self.b.T.tocsr()
        self.k_plus = (self.a_dag @ self.b_dag).tocsr()
        self.k_minus = (self.a @ self.b).tocsr()
        na = np.repeat(np.arange(dim1), dim1)
        nb = np.tile(np.arange(dim1), dim1)
        self.na, self.nb = na, nb
        self.number = sp.diags((na + nb).astype(float), format="csr")
        self.k_zero = sp.diags((na + nb + 1) / 2.0, format="csr")
        for m in (self.a, self.b, self.a_dag, self.b_dag, self.k_plus, self.k_minus, self.number, self.k_zero):
            m.sort_indices()
        self._sectors: dict[int, Sector] = {}
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** 2

    def index(self, na: int, nb: int) -> int:
        return na * (self.cutoff + 1) + nb

    def sector_indices(self, d: int) -> np.ndarray:
        if abs(d) > self.cutoff:
            raise ValueError(f"sector {d} empty at cutoff {self.cutoff}")
        n = np.arange(self.cutoff + 1 - abs(d))
        return (n + max(d, 0)) * (self.cutoff + 1) + (n + max(-d, 0))

    def sector(self, d: int) -> Sector:
        d = int(d)
        with self._lock:
            cached = self._sectors.get(d)
        if cached is not None:
            return cached
        idx = self.sector_indices(d)
        kp = self.k_plus[idx][:, idx].toarray()
        c = np.diag(kp, -1).copy()
        size = idx.shape[0]
        if size == 1:
            w, vt = np.zeros(1), np.ones((1, 1))
        else:
            # -i(K+ - K-) is similar to a real symmetric tridiagonal matrix with
            # off-diagonal -c under diag(i^n).
            w, vt = sla.eigh_tridiagonal(np.zeros(size), -c)
        phase = np.array([(1j) ** (n % 4) for n in range(size)])
        vecs = phase[:, None] * vt
        na = self.na[idx]
        nb = self.nb[idx]
        sec = Sector(d, abs(d) + 1, na, nb, na + nb + 1, kp, w, vecs)
        with self._lock:
            self._sectors.setdefault(d, sec)
        return sec

    def sectors(self):
        for d in range(-self.cutoff, self.cutoff + 1):
            yield self.sector(d)


@lru_cache(maxsize=4)
def build_operators(cutoff: int) -> OperatorSet:
    """Build (and memoise) the operator set at ``cutoff`` levels per mode."""
    return OperatorSet(cutoff)


def _check_leak(mass: float, what: str) -> None:
    if mass >= LEAK_TOLERANCE:
        raise TruncationLeakError(f"{what}: boundary mass {mass:.3e} >= {LEAK_TOLERANCE:.0e}")


def _block_matrix(ops: OperatorSet, blocks: dict[int, np.ndarray]) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for d, blk in blocks.items():
        idx = ops.sector_indices(d)
        r, c = np.meshgrid(idx, idx, indexing="ij")
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(blk.ravel())
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(ops.dim, ops.dim)
    )


def squeeze_matrix(ops: OperatorSet, zeta: complex, probe_shells: int = 0, check: bool = True) -> sp.csr_matrix:
    """Truncated ``S(zeta) = exp(zeta K+ - zeta* K-)``.

    The matrix is block diagonal in the sectors and is returned as CSR.
    Post hoc leak check: for every input Fock state with ``n_a + n_b <=
    probe_shells`` the image may carry at most ``LEAK_TOLERANCE`` probability
    on the two outermost levels of its sector.

    Raises
    ------
    TruncationLeakError
        If ``check`` is true and the leak bound fails.
    """
    zeta = complex(zeta)
    blocks = {}
    worst = 0.0
    for sec in ops.sectors():
        s = sec.squeeze(zeta)
        blocks[sec.d] = s
        probes = np.nonzero(sec.na + sec.nb <= probe_shells)[0]
        if probes.size and sec.size > 2:
            worst = max(worst, float(np.max(np.sum(np.abs(s[-2:, probes]) ** 2, axis=0))))
    if check:
        _check_leak(worst, "squeeze_matrix")
    return _block_matrix(ops, blocks)


def _kernel_block(sec: Sector, point: HyperboloidPoint, rows: int | None = None) -> np.ndarray:
    rows = sec.size if rows is None else rows
    s = sec.squeeze_rows(point.squeeze.zeta, rows)
    return 2.0 * (s * sec.parity()) @ s.conj().T


def wigner_kernel_matrix(ops: OperatorSet, point: HyperboloidPoint) -> sp.csr_matrix:
    """``2 S(zeta) exp(i pi K0) S(zeta)^dag`` with ``zeta = (tau/2) e^{i chi}``.

    The squeeze leak gate (vacuum probe) is applied first.
    """
    squeeze_matrix(ops, point.squeeze.zeta, check=True)
    return _block_matrix(ops, {sec.d: _kernel_block(sec, point) for sec in ops.sectors()})


@dataclass(frozen=True)
class DisentangledKernelParams:
    """Coefficients of the normal-ordered kernel.

    ``gamma_plus = e^{i chi} tanh tau``, ``gamma_minus = e^{-i chi} tanh tau`` and
    ``gamma_zero = 1 / cosh^2 tau``.
    """

    gamma_plus: complex
    gamma_minus: complex
    gamma_zero: float

    @classmethod
    def from_point(cls, point: HyperboloidPoint) -> "DisentangledKernelParams":
        t = math.tanh(point.tau)
        e = complex(math.cos(point.chi), math.sin(point.chi))
        return cls(e * t, e.conjugate() * t, 1.0 / math.cosh(point.tau) ** 2)


def disentangled_kernel_element(k: object, mu: object, mu_prime: object, point: HyperboloidPoint) -> complex:
    """``<k, mu| w |k, mu'>`` from the normal-ordered kernel.

    The kernel is ``2 exp(g+ K+) exp(i pi K0) g0^{K0} exp(g- K-)``. Acting to the
    right, ``exp(g- K-)`` lowers ``|mu'>`` and terminates at ``mu = k``. The
    diagonal factors are phases and powers. ``exp(g+ K+)`` then raises back to
    ``mu``. Every series is therefore finite and is summed exactly through
    repeated ladder actions ``K+- |k, m> = sqrt((m +- k)(m -+ k +- 1)) |k, m +- 1>``.

    Raises
    ------
    ValueError
        If ``mu`` or ``mu'`` is below ``k`` or not in the ladder of ``k``.
    """
    kk = HalfInteger.of(k)
    m1 = HalfInteger.of(mu)
    m2 = HalfInteger.of(mu_prime)
    if kk.twice < 1:
        raise ValueError("k must be >= 1/2")
    for m in (m1, m2):
        if m < kk or (m - kk).twice % 2:
            raise ValueError(f"weight {m} is not in the ladder of k = {kk}")
    p = DisentangledKernelParams.from_point(point)
    kf = float(kk)
    i = (m1 - kk).twice // 2
    j = (m2 - kk).twice // 2
    lo = min(i, j)
    # exp(g- K-)|mu'>: components on nu = k + m, m = 0..j
    vec = np.zeros(j + 1, dtype=complex)
    term = np.zeros(j + 1, dtype=complex)
    term[j] = 1.0
    vec += term
    for step in range(1, j + 1):
        shifted = np.zeros_like(term)
        m = np.arange(1, j + 1)
        mu_m = kf + m
        shifted[:-1] = term[1:] * np.sqrt((mu_m - kf) * (mu_m + kf - 1.0))
        term = shifted * (p.gamma_minus / step)
        vec += term
    vec = vec[: lo + 1]
    nu_twice = kk.twice + 2 * np.arange(lo + 1)
    diag = np.array([exact_phase(int(t)) for t in nu_twice]) * np.exp((nu_twice / 2.0) * math.log(p.gamma_zero))
    vec = vec * diag
    # exp(g+ K+): project onto mu = k + i
    out = np.zeros(i + 1, dtype=complex)
    out[: lo + 1] = vec
    term = out.copy()
    for step in range(1, i + 1):
        shifted = np.zeros_like(term)
        m = np.arange(i)
        mu_m = kf + m
        shifted[1:] = term[:-1] * np.sqrt((mu_m + kf) * (mu_m - kf + 1.0))
        term = shifted * (p.gamma_plus / step)
        out += term
    return complex(2.0 * out[i])


@dataclass(frozen=True)
class GateReport:
    """Outcome of a cutoff-doubling convergence check."""

    passed: bool
    cutoffs: tuple[int, int]
    max_change: float
    tol: float = GATE_TOLERANCE

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "cutoffs": list(self.cutoffs),
            "max_change": self.max_change,
            "tol": self.tol,
        }


def converge(
    evaluate: Callable[[int], np.ndarray],
    start: int,
    tol: float = GATE_TOLERANCE,
    max_cutoff: int = 1600,
) -> tuple[np.ndarray, GateReport]:
    """Double the cutoff until ``evaluate`` changes by at most ``tol``.

    The change is measured as ``max |new - old| / max(1, |new|)``. The value
    at the larger cutoff is returned. Cutoffs at which ``evaluate`` raises
    :class:`TruncationLeakError` count as unconverged.
    """
    n = int(start)
    prev = None
    last_change = math.inf
    while n <= max_cutoff:
        try:
            cur = np.asarray(evaluate(n))
        except TruncationLeakError:
            cur = None
        if prev is not None and cur is not None:
            last_change = float(np.max(np.abs(cur - prev) / np.maximum(1.0, np.abs(cur)), initial=0.0))
            if last_change <= tol:
                return cur, GateReport(True, (n // 2, n), last_change, tol)
        prev = cur
        n *= 2
    if prev is None:
        raise TruncationLeakError(f"no leak-free cutoff up to {max_cutoff}")
    return prev, GateReport(False, (n // 4, n // 2), last_change, tol)


def _sector_leak(sec: Sector, vec: np.ndarray) -> float:
    return float(np.sum(np.abs(vec[-2:]) ** 2)) if sec.size > 2 else 0.0


def kernel_elements(
    k: object,
    count: int,
    points: list[HyperboloidPoint],
    start_cutoff: int | None = None,
    tol: float = GATE_TOLERANCE,
    mirror: bool = False,
) -> tuple[np.ndarray, GateReport]:
    """Boxed-kernel matrix elements ``<k,mu|w|k,mu'>`` for ``mu, mu' < k + count``.

    Parameters
    ----------
    k : half-integer
        Irrep label; the sector ``d = 2k - 1`` (or ``-(2k - 1)`` if ``mirror``)
        is used.
    count : int
        Number of weights on each side.
    points : list of HyperboloidPoint
        Evaluation points.

    Returns
    -------
    values : ndarray, shape (len(points), count, count)
    report : GateReport
    """
    kk = HalfInteger.of(k)
    d = -(kk.twice - 1) if mirror else kk.twice - 1
    count = int(count)
    if start_cutoff is None:
        start_cutoff = max(40, abs(d) + 2 * count)

    def evaluate(n: int) -> np.ndarray:
        if n < abs(d) + count + 2:
            raise TruncationLeakError("sector too short")
        sec = build_operators(n).sector(d)
        out = np.empty((len(points), count, count), dtype=complex)
        for p_i, pt in enumerate(points):
            s = sec.squeeze_rows(pt.squeeze.zeta, count)
            # rows of S^dag: the columns beyond the cutoff must be empty
            _check_leak(float(np.max(np.sum(np.abs(s[:, -2:]) ** 2, axis=1))), "kernel_elements")
            out[p_i] = 2.0 * (s * sec.parity()) @ s.conj().T
        return out

    return converge(evaluate, start_cutoff, tol)


def sector_vectors(amplitudes: np.ndarray) -> dict[int, np.ndarray]:
    """Split a Fock amplitude array into per-sector vectors ordered by ``mu``.

    Only sectors with a nonzero amplitude are returned.
    """
    amps = np.asarray(amplitudes)
    na_max, nb_max = amps.shape[0] - 1, amps.shape[1] - 1
    out = {}
    for d in range(-nb_max, na_max + 1):
        diag = np.diagonal(amps, offset=-d)
        if np.any(diag != 0):
            out[d] = np.array(diag)
    return out


def assemble_sectors(vectors: dict[int, np.ndarray], shape: tuple[int, int]) -> np.ndarray:
    """Inverse of :func:`sector_vectors` for a target amplitude shape.

    Raises ``ValueError`` when a nonzero entry does not fit in ``shape``.
    """
    amps = np.zeros(shape, dtype=complex)
    for d, vec in vectors.items():
        n = np.arange(vec.shape[0])
        na = n + max(d, 0)
        nb = n + max(-d, 0)
        fit = (na < shape[0]) & (nb < shape[1])
        if np.any(vec[~fit] != 0):
            raise ValueError(f"sector {d} does not fit into shape {shape}")
        amps[na[fit], nb[fit]] = vec[fit]
    return amps


def fock_wigner(
    state: TwoModeState,
    points: list[HyperboloidPoint],
    start_cutoff: int | None = None,
    tol: float = GATE_TOLERANCE,
    max_cutoff: int = 1600,
) -> tuple[np.ndarray, GateReport]:
    """``<Psi| w(zeta) |Psi>`` from the truncated-Fock kernel, cutoff-converged.

    Each sector vector is padded into the sector of a larger operator set and
    ``w`` is applied as ``2 Sum e^{i pi mu} |(S^dag Psi)_mu|^2``. The image of
    every sector must leave less than ``LEAK_TOLERANCE`` on its two outermost
    levels.
    """
    vecs = sector_vectors(state.amplitudes)
    base = state.cutoff
    if start_cutoff is None:
        start_cutoff = max(2 * base, base + 40)

    def evaluate(n: int) -> np.ndarray:
        if n < base + 2:
            raise TruncationLeakError("cutoff below state support")
        ops = build_operators(n)
        vals = np.zeros(len(points), dtype=complex)
        for d, v in vecs.items():
            sec = ops.sector(d)
            padded = np.zeros(sec.size, dtype=complex)
            padded[: v.shape[0]] = v
            par = sec.parity()
            for p_i, pt in enumerate(points):
                phi = sec.apply_squeeze(pt.squeeze.zeta, padded, adjoint=True)
                _check_leak(_sector_leak(sec, phi), "fock_wigner")
                vals[p_i] += 2.0 * np.sum(par * np.abs(phi) ** 2)
        return vals

    return converge(evaluate, start_cutoff, tol, max_cutoff)


# -- single-mode factors -------------------------------------------------------


def _single_mode_lowering(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def _expm_on_vacuum(generator: np.ndarray, keep: int) -> tuple[np.ndarray, float]:
    vec = sla.expm(generator)[:, 0]
    leak = float(np.sum(np.abs(vec[-2:]) ** 2))
    return vec[:keep], leak


def displaced_vacuum(alpha: complex, cutoff: int, method: str = "expm") -> tuple[np.ndarray, float]:
    """Coherent state ``exp(alpha a^dag - alpha* a)|0>`` on levels ``0..cutoff``.

    ``method="expm"`` exponentiates the truncated generator on a working space
    twice as large and reports the boundary mass of the working vector as the
    leak. ``method="series"`` applies the normal-ordered product
    ``e^{-|alpha|^2/2} exp(alpha a^dag)`` to the vacuum by repeated raising and
    reports a leak of zero (the result is exact up to rounding).

    Returns
    -------
    vec : ndarray, shape (cutoff + 1,)
    leak : float
    """
    alpha = complex(alpha)
    dim = cutoff + 1
    if method == "expm":
        work = 2 * dim + 20
        a = _single_mode_lowering(work)
        return _expm_on_vacuum(alpha * a.T - alpha.conjugate() * a, dim)
    if method == "series":
        vec = np.zeros(dim, dtype=complex)
        vec[0] = math.exp(-0.5 * abs(alpha) ** 2)
        for n in range(1, dim):
            vec[n] = vec[n - 1] * alpha / math.sqrt(n)
        return vec, 0.0
    raise ValueError(f"unknown method {method!r}")


def squeezed_vacuum(zeta: complex, cutoff: int, method: str = "expm") -> tuple[np.ndarray, float]:
    """Squeezed vacuum ``exp((zeta a^dag^2 - zeta* a^2)/2)|0>`` on levels ``0..cutoff``.

    The ``"series"`` method uses the normal-ordered form
    ``(cosh r)^{-1/2} exp(e^{i theta} tanh(r) a^dag^2 / 2)|0>`` with
    ``zeta = r e^{i theta}`` and builds the even levels by repeated action of
    ``a^dag^2``. See :func:`displaced_vacuum` for the return values.
    """
    zeta = complex(zeta)
    dim = cutoff + 1
    if method == "expm":
        work = 2 * dim + 20
        a = _single_mode_lowering(work)
        a2 = a @ a
        return _expm_on_vacuum(0.5 * (zeta * a2.T - zeta.conjugate() * a2), dim)
    if method == "series":
        r = abs(zeta)
        g = complex(math.tanh(r) * math.cos(math.atan2(zeta.imag, zeta.real)),
                    math.tanh(r) * math.sin(math.atan2(zeta.imag, zeta.real)))
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0 / math.sqrt(math.cosh(r))
        for m in range(0, (dim - 1) // 2):
            n = 2 * m
            vec[n + 2] = vec[n] * (0.5 * g) * math.sqrt((n + 1.0) * (n + 2.0)) / (m + 1.0)
        return vec, 0.0
    raise ValueError(f"unknown method {method!r}")
