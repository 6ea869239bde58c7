"""Log-gamma, terminating Gauss series and the SU(1,1) d-functions.

The d-function of the positive discrete series is

    d^k_{mu mu'}(tau) = <k, mu| exp(tau/2 (K+ - K-)) |k, mu'>,

real for real ``tau``. For ``mu >= mu'`` it equals a Gamma-ratio prefactor
times powers of ``cosh(tau/2)`` and ``sinh(tau/2)`` times a terminating
2F1 in ``z = tanh^2(tau/2)``. That polynomial is evaluated as a Jacobi
polynomial ``P_n^(delta, 2k-1)(1 - 2z)`` by its three-term recurrence.
Summing the hypergeometric terms directly cancels catastrophically once
``mu - k`` reaches a few dozen, even with compensated summation. The
recurrence is carried in a scaled form bounded by one, so the prefactor
stays in log space and nothing overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import HalfInteger

__all__ = [
    "log_gamma",
    "gauss_2f1_terminating",
    "DFunctionQuery",
    "dfunction",
    "dfunction_row",
    "dfunction_matrix",
    "dfunction_matrices",
    "dfunction_lower_bands",
    "BandTables",
    "band_tables",
    "band_values",
]


def log_gamma(x: float) -> float:
    """Natural logarithm of the Gamma function for ``x > 0``.

    Parameters
    ----------
    x : float
        Positive argument.

    Returns
    -------
    float
        ``ln Gamma(x)``.

    Raises
    ------
    ValueError
        If ``x`` is not a finite positive number.
    """
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def gauss_2f1_terminating(a: float, b: float, c: float, z: float) -> float:
    """Sum the terminating series ``2F1(a, b; c; z)`` for ``a = 0, -1, -2, ...``.

    The ``1 - a`` terms are generated by their ratio recurrence and added with
    ``math.fsum``, so the summation itself is exact up to the final rounding.
    The terms themselves can still be much larger than the result. For large
    degrees use :func:`dfunction`, which avoids the series.

    Raises
    ------
    ValueError
        If ``a`` is not a nonpositive integer, if ``z`` lies outside
        ``[0, 1)``, or if ``c`` is a nonpositive integer hit by ``(c)_n``
        before the series terminates.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if not (math.isfinite(a) and a <= 0 and a == math.floor(a)):
        raise ValueError(f"series does not terminate: a = {a!r} is not a nonpositive integer")
    if not (0.0 <= z < 1.0):
        raise ValueError(f"z must lie in [0, 1), got {z!r}")
    n_terms = int(-a)
    if c <= 0 and c == math.floor(c) and -c < n_terms:
        raise ValueError(f"(c)_n vanishes before termination for c = {c!r}")
    terms = [1.0]
    t = 1.0
    for n in range(n_terms):
        t *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        terms.append(t)
    return math.fsum(terms)


@dataclass(frozen=True)
class DFunctionQuery:
    """Arguments of a single d-function value.

    Fields accept anything :meth:`HalfInteger.of` understands.
    """

    k: HalfInteger
    mu: HalfInteger
    mu_prime: HalfInteger
    tau: float

    def __post_init__(self) -> None:
        k = HalfInteger.of(self.k)
        mu = HalfInteger.of(self.mu)
        mup = HalfInteger.of(self.mu_prime)
        tau = float(self.tau)
        if k.twice < 1:
            raise ValueError(f"k must be >= 1/2, got {k}")
        for name, m in (("mu", mu), ("mu_prime", mup)):
            if m < k:
                raise ValueError(f"{name} = {m} is below k = {k}")
            if (m - k).twice % 2:
                raise ValueError(f"{name} - k must be an integer, got {m} - {k}")
        if not (math.isfinite(tau) and tau >= 0.0):
            raise ValueError(f"tau must be finite and >= 0, got {self.tau!r}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "mu_prime", mup)
        object.__setattr__(self, "tau", tau)


def _log_cosh_sinh(h):
    """``(ln cosh h, ln sinh h)`` without overflow for large ``h``."""
    h = np.asarray(h, dtype=float)
    e = np.exp(-2.0 * h)
    lc = h + np.log1p(e) - math.log(2.0)
    with np.errstate(divide="ignore"):
        ls = h + np.log(-np.expm1(-2.0 * h)) - math.log(2.0)
    return lc, ls


def _scalar_lower(twice_k: int, n: int, delta: int, tau: float) -> float:
    """d^k_{k+n+delta, k+n}(tau) for ``delta >= 0`` and ``tau > 0``."""
    two_k = twice_k  # 2k
    alpha, beta = float(delta), float(two_k - 1)
    q = max(alpha, beta)
    h = 0.5 * tau
    t = math.tanh(h)
    x = 1.0 - 2.0 * t * t
    r_prev, r = 0.0, 1.0
    if n >= 1:
        r_prev, r = r, ((alpha + 1.0) + (alpha + beta + 2.0) * 0.5 * (x - 1.0)) / (1.0 + q)
    for m in range(2, n + 1):
        s = 2.0 * m + alpha + beta
        den = 2.0 * m * (m + alpha + beta) * (s - 2.0)
        a_m = (s - 1.0) * (s * (s - 2.0) * x + alpha * alpha - beta * beta) / den
        b_m = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * s / den
        r_prev, r = r, a_m * r * m / (m + q) - b_m * r_prev * m * (m - 1.0) / ((m + q) * (m + q - 1.0))
    lc, ls = _log_cosh_sinh(h)
    lg = math.lgamma
    log_pre = 0.5 * (
        lg(two_k + n + delta) - lg(two_k + n) - lg(n + delta + 1.0) - lg(n + 1.0)
    ) + lg(n + q + 1.0) - lg(q + 1.0)
    log_pre += -(two_k + delta) * float(lc) + (delta * float(ls) if delta else 0.0)
    return r * math.exp(log_pre)


def dfunction(q: DFunctionQuery) -> float:
    """Evaluate ``d^k_{mu mu'}(tau)``.

    Values with ``mu < mu'`` are obtained from the transposed element through
    ``d_{mu mu'} = (-1)^{mu' - mu} d_{mu' mu}``. At ``tau = 0`` the Kronecker
    delta is returned exactly.

    Examples
    --------
    >>> round(dfunction(DFunctionQuery("1/2", "1/2", "1/2", 1.0)), 12)
    0.886818883970
    """
    if not isinstance(q, DFunctionQuery):
        raise TypeError("dfunction expects a DFunctionQuery")
    if q.tau == 0.0:
        return 1.0 if q.mu == q.mu_prime else 0.0
    i = (q.mu - q.k).twice // 2
    j = (q.mu_prime - q.k).twice // 2
    if i >= j:
        return _scalar_lower(q.k.twice, j, i - j, q.tau)
    sign = -1.0 if (j - i) % 2 else 1.0
    return sign * _scalar_lower(q.k.twice, i, j - i, q.tau)


@dataclass(frozen=True)
class BandTables:
    """Tau-independent data for the banded d-function recurrence.

    Built once for a set of irreps (rows) and a common number of weights,
    then reused for any number of angles by :func:`band_values`. The scaled
    Jacobi recurrence reads ``r_m = (cx_m x + c0_m) r_{m-1} - cb_m r_{m-2}``
    with ``x = 1 - 2 tanh^2(tau/2)``.
    """

    twice_k: np.ndarray  # (R,)
    size: int
    log_pre: np.ndarray  # (R, M, M) [row, n, delta]; -inf where n + delta >= M
    cx: np.ndarray  # (M, R, M) [m, row, delta]
    c0: np.ndarray
    cb: np.ndarray


def band_tables(twice_k, size: int) -> BandTables:
    """Prepare :class:`BandTables` for irreps with ``2k = twice_k``."""
    twice_k = np.atleast_1d(np.asarray(twice_k, dtype=np.int64))
    if twice_k.ndim != 1:
        raise ValueError("twice_k must be 1-D")
    if np.any(twice_k < 1):
        raise ValueError("k must be >= 1/2")
    M = int(size)
    if M < 1:
        raise ValueError("size must be >= 1")
    R = twice_k.shape[0]
    two_k = twice_k.astype(float)
    m_idx = np.arange(M, dtype=float)
    lg_k = gammaln(two_k[:, None] + m_idx[None, :])  # ln Gamma(2k + m)
    lg_f = gammaln(m_idx + 1.0)  # ln m!
    n_idx = np.arange(M)[:, None]
    d_idx = np.arange(M)[None, :]
    nd = np.minimum(n_idx + d_idx, M - 1)  # clipped; invalid slots set below
    pre = 0.5 * (lg_k[:, nd] - lg_k[:, n_idx] - lg_f[nd] - lg_f[n_idx])
    # + ln C(n + q, n), q = max(delta, 2k - 1)
    beta = (two_k - 1.0)[:, None]
    use_beta = (beta >= m_idx[None, :])[:, None, :]
    binom_beta = lg_k[:, n_idx] - lg_k[:, :1][:, :, None]
    binom_alpha = (lg_f[nd] - lg_f[d_idx])[None, :, :]
    pre = pre + np.where(use_beta, binom_beta, binom_alpha)
    pre[:, (n_idx + d_idx) >= M] = -np.inf

    alpha = m_idx[None, :]
    q = np.maximum(alpha, beta)
    ab = alpha + beta
    cx = np.zeros((M, R, M))
    c0 = np.zeros((M, R, M))
    cb = np.zeros((M, R, M))
    if M > 1:
        cx[1] = (ab + 2.0) / (2.0 * (1.0 + q))
        c0[1] = (alpha + 1.0 - 0.5 * (ab + 2.0)) / (1.0 + q)
    for m in range(2, M):
        s = 2.0 * m + ab
        den = 2.0 * m * (m + ab) * (s - 2.0)
        scale = m / (m + q)
        cx[m] = (s - 1.0) * s * (s - 2.0) / den * scale
        c0[m] = (s - 1.0) * (alpha * alpha - beta * beta) / den * scale
        cb[m] = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * s / den * (m * (m - 1.0) / ((m + q) * (m + q - 1.0)))
    return BandTables(twice_k, M, pre, cx, c0, cb)


def band_values(tables: BandTables, tau, paired: bool = False) -> np.ndarray:
    """Evaluate banded d-functions ``d^k_{k+n+delta, k+n}(tau)``.

    Parameters
    ----------
    tables : BandTables
        Rows ``r = 0..R-1``.
    tau : array_like of float
        Angles ``>= 0``. Shape ``(T,)`` for an outer product with the rows,
        or ``(R,)`` with ``paired=True`` for one angle per row.

    Returns
    -------
    ndarray
        Shape ``(T, R, M, M)`` (outer) or ``(R, M, M)`` (paired), indexed
        ``[..., n, delta]`` and zero where ``n + delta >= M``.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(~np.isfinite(tau)) or np.any(tau < 0):
        raise ValueError("tau must be finite and >= 0")
    R, M = tables.twice_k.shape[0], tables.size
    if paired:
        if tau.shape != (R,):
            raise ValueError("paired evaluation needs one tau per row")
        h = (0.5 * tau)[:, None]  # (R, 1)
    else:
        h = (0.5 * tau)[:, None, None]  # (T, 1, 1)
    t = np.tanh(h)
    x = 1.0 - 2.0 * t * t
    shape = np.broadcast_shapes(x.shape, (R, M))
    vals = np.empty(shape[:-1] + (M, M))
    r_prev = np.zeros(shape)
    r = np.ones(shape)
    vals[..., 0, :] = r
    for m in range(1, M):
        r_new = (tables.cx[m] * x + tables.c0[m]) * r
        if m > 1:
            r_new -= tables.cb[m] * r_prev
        r_prev, r = r, r_new
        vals[..., m, :] = r
    two_k = tables.twice_k.astype(float)[:, None]
    alpha = np.arange(M, dtype=float)[None, :]
    lc, ls = _log_cosh_sinh(h)
    # a finite floor keeps 0 * log(sinh h) at zero when sinh h underflows
    ls = np.where(h > 0, np.maximum(ls, -1e300), 0.0)
    tau_part = -(two_k + alpha) * lc + alpha * ls  # (..., R, M)
    log_w = tables.log_pre + tau_part[..., None, :]
    np.exp(log_w, out=log_w)
    vals *= log_w
    zero = np.broadcast_to(h == 0.0, shape)[..., 0]
    if np.any(zero):
        ident = np.zeros((M, M))
        ident[:, 0] = 1.0
        vals[zero] = ident
    return vals


def dfunction_lower_bands(twice_k, tau, size: int) -> np.ndarray:
    """Lower-triangle d-function values arranged by band.

    Parameters
    ----------
    twice_k : array_like of int, shape (Q,)
        ``2k`` for each query.
    tau : array_like of float, shape (Q,)
        Hyperbolic angle for each query, ``tau >= 0``.
    size : int
        Number of weights ``mu = k, ..., k + size - 1``.

    Returns
    -------
    ndarray, shape (Q, size, size)
        ``E[q, n, delta] = d^{k_q}_{k+n+delta, k+n}(tau_q)`` when
        ``n + delta < size`` and zero otherwise.
    """
    twice_k = np.atleast_1d(np.asarray(twice_k, dtype=np.int64))
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if twice_k.shape != tau.shape or twice_k.ndim != 1:
        raise ValueError("twice_k and tau must be 1-D arrays of equal length")
    return band_values(band_tables(twice_k, size), tau, paired=True)


def dfunction_matrices(twice_k, tau, size: int) -> np.ndarray:
    """Full matrices ``D[q, i, j] = d^{k_q}_{k+i, k+j}(tau_q)``, shape (Q, size, size)."""
    bands = dfunction_lower_bands(twice_k, tau, size)
    Q, M = bands.shape[0], bands.shape[1]
    out = np.zeros((Q, M, M))
    n = np.arange(M)
    for d in range(M):
        cols = n[: M - d]
        lower = bands[:, : M - d, d]
        out[:, cols + d, cols] = lower
        if d:
            out[:, cols, cols + d] = -lower if d % 2 else lower
    return out


def dfunction_matrix(k: object, tau: float, size: int) -> np.ndarray:
    """d-function matrix of a single irrep over ``mu, mu' = k .. k+size-1``."""
    kk = HalfInteger.of(k)
    return dfunction_matrices([kk.twice], [float(tau)], size)[0]


def dfunction_row(k: object, mu: object, tau: float, count: int) -> np.ndarray:
    """Row ``[d^k_{mu, k+j}(tau) for j in range(count)]``.

    The whole row shares a single log-gamma table and recurrence sweep.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    q = DFunctionQuery(k, mu, k, tau)  # validates k, mu and tau
    i = (q.mu - q.k).twice // 2
    size = max(i + 1, count)
    return dfunction_matrices([q.k.twice], [q.tau], size)[0, i, :count].copy()
