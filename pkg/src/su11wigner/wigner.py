"""Closed-form SU(1,1) Wigner function of decomposed two-mode states.

For one irrep copy with amplitudes ``Psi_mu`` the Wigner function at
``(tau, chi)`` is

    W = 2 Sum_{mu, mu'} conj(Psi_mu) Psi_mu' e^{i (mu - mu') chi}
          d^k_{mu mu'}(2 tau) e^{i pi mu'},

and a general state sums this over all blocks and copies. Mixed sectors do not
interfere because the kernel preserves ``n_a - n_b``. The ``chi`` dependence
is a finite Fourier series in ``delta = mu - mu'``. Grids are therefore
evaluated by computing the coefficients ``C_delta(tau)`` once per distinct
``tau`` and summing the series for every ``chi`` on that radius.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .core import DecomposedState, HyperboloidPoint, TwoModeState
from .special import band_tables, band_values

__all__ = [
    "PhaseConvention",
    "GridSpec",
    "WignerField",
    "coords_from_xi",
    "wigner_values",
    "wigner_point",
    "wigner_grid",
    "wigner_of_two_mode",
    "DEFAULT_TAIL_TOL",
]

#: Default bound on the discarded part of the double sum, relative to the norm.
DEFAULT_TAIL_TOL = 1e-10
_CHUNK_ELEMENTS = 2_000_000
_QUARTER = np.array([1.0, 1.0j, -1.0, -1.0j])


class PhaseConvention(str, Enum):
    """How the half-integer parity phase ``e^{i pi mu}`` is presented.

    ``LITERAL`` keeps ``e^{i pi mu}`` as is, so values are complex in general.
    ``PER_IRREP_NORMALIZED`` multiplies the contribution of each irrep by
    ``e^{-i pi k}``, which makes every single-irrep Wigner function real.
    """

    LITERAL = "literal"
    PER_IRREP_NORMALIZED = "per_irrep_normalized"

    @classmethod
    def parse(cls, value: "PhaseConvention | str") -> "PhaseConvention":
        if isinstance(value, cls):
            return value
        aliases = {"normalized": cls.PER_IRREP_NORMALIZED, "per_irrep_normalized": cls.PER_IRREP_NORMALIZED,
                   "literal": cls.LITERAL}
        try:
            return aliases[str(value)]
        except KeyError:
            raise ValueError(f"unknown phase convention {value!r}") from None


def coords_from_xi(xi) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``(tau, chi)`` of disk points, with ``chi`` in ``(-pi, pi]``."""
    xi = np.asarray(xi, dtype=complex)
    r = np.abs(xi)
    if np.any(r >= 1.0):
        raise ValueError("disk points must satisfy |xi| < 1")
    tau = 2.0 * np.arctanh(r)
    chi = np.arctan2(xi.imag, xi.real)
    chi = np.where(chi <= -math.pi, math.pi, chi)
    chi = np.where(r == 0.0, 0.0, chi)
    return tau, chi


def _canonical_chi(chi: np.ndarray) -> np.ndarray:
    c = np.remainder(chi + math.pi, 2.0 * math.pi) - math.pi  # [-pi, pi)
    return np.where(c <= -math.pi, c + 2.0 * math.pi, c)


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid on the disk or on the hyperboloid.

    Parameters
    ----------
    system : {"disk_cartesian", "hyperboloid_polar"}
        ``disk_cartesian`` samples ``xi = x + i y`` on a rectangle and keeps
        only the points with ``|xi| < 1``. ``hyperboloid_polar`` samples
        ``(tau, chi)``.
    axis0 : (start, stop, count)
        ``x`` for the disk grid, ``tau`` for the polar grid. Both ends are
        included.
    axis1 : (start, stop, count)
        ``y`` for the disk grid (both ends included) or ``chi`` for the polar
        grid (``stop`` excluded, so a full turn is sampled without repeating
        the seam).
    """

    system: str
    axis0: tuple[float, float, int]
    axis1: tuple[float, float, int]

    SYSTEMS = ("disk_cartesian", "hyperboloid_polar")

    def __post_init__(self) -> None:
        if self.system not in self.SYSTEMS:
            raise ValueError(f"unknown coordinate system {self.system!r}")
        for name in ("axis0", "axis1"):
            a = getattr(self, name)
            lo, hi, n = float(a[0]), float(a[1]), int(a[2])
            if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"{name} needs finite bounds and count >= 1")
            object.__setattr__(self, name, (lo, hi, n))
        if self.system == "hyperboloid_polar" and min(self.axis0[:2]) < 0:
            raise ValueError("tau range must be >= 0")
        if self.point_count == 0:
            raise ValueError("grid has no points inside the unit disk")

    @classmethod
    def disk(cls, n: int, extent: float = 0.99) -> "GridSpec":
        """Square ``n x n`` grid on ``[-extent, extent]^2``."""
        return cls("disk_cartesian", (-extent, extent, n), (-extent, extent, n))

    @classmethod
    def polar(cls, n_tau: int, n_chi: int, tau_max: float, tau_min: float | None = None) -> "GridSpec":
        """Polar grid; by default the radii start half a step away from the apex."""
        if tau_min is None:
            tau_min = 0.5 * tau_max / n_tau
        return cls("hyperboloid_polar", (tau_min, tau_max, n_tau), (-math.pi, math.pi, n_chi))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis0[2], self.axis1[2])

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        a0 = np.linspace(*self.axis0)
        lo, hi, n = self.axis1
        if self.system == "hyperboloid_polar":
            a1 = lo + (hi - lo) * np.arange(n) / n
        else:
            a1 = np.linspace(lo, hi, n)
        return a0, a1

    def _all_points(self):
        a0, a1 = self.axes()
        i0, i1 = np.meshgrid(np.arange(a0.size), np.arange(a1.size), indexing="ij")
        i0, i1 = i0.ravel(), i1.ravel()
        if self.system == "disk_cartesian":
            xi = a0[i0] + 1j * a1[i1]
            keep = np.abs(xi) < 1.0
            return i0[keep], i1[keep], xi[keep], None, None
        tau = a0[i0]
        chi = _canonical_chi(a1[i1])
        chi = np.where(tau == 0.0, 0.0, chi)
        xi = np.tanh(0.5 * tau) * np.exp(1j * chi)
        return i0, i1, xi, tau, chi

    @property
    def point_count(self) -> int:
        return int(self._all_points()[0].size)

    def points(self) -> "GridPoints":
        i0, i1, xi, tau, chi = self._all_points()
        if tau is None:
            tau, chi = coords_from_xi(xi)
        return GridPoints(np.stack([i0, i1], axis=1), xi, tau, chi)

    def to_dict(self) -> dict:
        return {"system": self.system, "axis0": list(self.axis0), "axis1": list(self.axis1)}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(d["system"], tuple(d["axis0"]), tuple(d["axis1"]))


@dataclass(frozen=True, eq=False)
class GridPoints:
    """Flattened grid points: integer indices and both coordinate forms."""

    index: np.ndarray  # (P, 2)
    xi: np.ndarray
    tau: np.ndarray
    chi: np.ndarray


@dataclass(frozen=True, eq=False)
class WignerField:
    """Wigner values sampled on a grid.

    ``values[p]`` belongs to ``points.index[p]``, with ``points`` as produced by
    ``grid.points()``.
    """

    grid: GridSpec
    values: np.ndarray
    convention: PhaseConvention
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (self.grid.point_count,):
            raise ValueError("values must have one entry per grid point")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "convention", PhaseConvention.parse(self.convention))

    @property
    def points(self) -> GridPoints:
        return self.grid.points()

    def image(self, kind: str = "abs") -> np.ndarray:
        """Values on the ``grid.shape`` array; points outside the disk are NaN."""
        data = {"abs": np.abs, "real": np.real, "imag": np.imag}[kind](self.values)
        img = np.full(self.grid.shape, np.nan)
        idx = self.points.index
        img[idx[:, 0], idx[:, 1]] = data
        return img

    def local_maxima(self, kind: str = "abs", rel_threshold: float = 0.05) -> list[dict]:
        """Strict local maxima over the eight neighbours of each grid cell.

        Cells outside the disk are ignored. On polar grids the ``chi`` axis
        wraps around. When the innermost ring lies within one radial step of
        the apex, its cells surround the same point and are treated as one
        cell: only the largest of them is a candidate, compared against the
        next ring. Maxima below ``rel_threshold`` times the global maximum are
        discarded.
        """
        img = self.image(kind)
        n0, n1 = img.shape
        periodic = self.grid.system == "hyperboloid_polar"
        apex_ring = False
        if periodic:
            t0, t1, nt = self.grid.axis0
            step = (t1 - t0) / (nt - 1) if nt > 1 else math.inf
            apex_ring = t0 <= step
        top = np.nanmax(img)
        found = []
        j_apex = int(np.nanargmax(img[0])) if apex_ring and np.any(np.isfinite(img[0])) else -1
        pts = self.points
        lookup = {(int(a), int(b)): p for p, (a, b) in enumerate(pts.index)}
        for i in range(n0):
            for j in range(n1):
                v = img[i, j]
                if not np.isfinite(v) or v < rel_threshold * top or v <= 0:
                    continue
                if apex_ring and i == 0 and j != j_apex:
                    continue
                strict = True
                for di in (-1, 0, 1):
                    for dj in (-1, 0, 1):
                        if di == 0 and (dj == 0 or (apex_ring and i == 0)):
                            continue
                        a, b = i + di, j + dj
                        if periodic:
                            b %= n1
                        if not (0 <= a < n0 and 0 <= b < n1):
                            continue
                        w = img[a, b]
                        if np.isfinite(w) and w >= v:
                            strict = False
                            break
                    if not strict:
                        break
                if strict:
                    p = lookup[(i, j)]
                    found.append({"index": (i, j), "value": float(v), "xi": complex(pts.xi[p]),
                                  "tau": float(pts.tau[p]), "chi": float(pts.chi[p])})
        return found


# -- evaluation engine ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Group:
    twice_k: np.ndarray  # (R,)
    psi: np.ndarray  # (R, M)
    v: np.ndarray  # (R, M): psi times the parity phase
    size: int

    def cross_terms(self, r0: int, r1: int) -> tuple[np.ndarray, np.ndarray]:
        """``2 conj(Psi_{n+delta}) v_n`` and ``2 (-1)^delta conj(Psi_n) v_{n+delta}``."""
        M = self.size
        psi, v = self.psi[r0:r1], self.v[r0:r1]
        n = np.arange(M)[:, None]
        d = np.arange(M)[None, :]
        valid = (n + d) < M
        nd = np.minimum(n + d, M - 1)
        sign = np.where(d % 2 == 0, 2.0, -2.0)
        lower = np.conj(psi[:, nd]) * v[:, n] * (2.0 * valid)
        upper = np.conj(psi[:, n]) * v[:, nd] * (sign * valid)
        return lower, upper


def _rows(state: DecomposedState):
    for b in state.blocks:
        for row in b.psi:
            yield b.k.twice, row


def _truncate(rows: list[tuple[int, np.ndarray]], tol: float) -> list[tuple[int, np.ndarray]]:
    """Drop rows and row tails while bounding the change of W by ``tol * |Psi|^2``.

    A dropped row changes W by at most ``2 |row|^2``; trimming a row into
    head ``h`` and tail ``t`` changes it by at most ``2 (2|h||t| + |t|^2)``
    (each block of the kernel has operator norm at most 2).
    """
    norms = np.array([float(np.sum(np.abs(r) ** 2)) for _, r in rows])
    total = float(norms.sum())
    if total == 0.0:
        return []
    budget = tol * total
    order = np.argsort(norms, kind="stable")
    cum = 2.0 * np.cumsum(norms[order])
    n_drop = int(np.searchsorted(cum, 0.5 * budget, side="right"))
    keep = np.sort(order[n_drop:])
    kept_norm = float(norms[keep].sum())
    out = []
    for i in keep:
        tk, row = rows[i]
        share = 0.5 * budget * norms[i] / kept_norm
        p = np.abs(row) ** 2
        tail = np.concatenate([np.cumsum(p[::-1])[::-1], [0.0]])  # tail[L] = |t_L|^2
        head = norms[i] - tail
        bound = 2.0 * (2.0 * np.sqrt(np.maximum(head, 0.0) * tail) + tail)
        ok = np.nonzero(bound <= share)[0]
        length = int(ok[0]) if ok.size else row.shape[0]
        length = max(length, 1)
        out.append((tk, row[:length]))
    return out


def _pack(state: DecomposedState, conv: PhaseConvention, tol: float) -> list[_Group]:
    rows = _truncate(list(_rows(state)), tol)
    by_len: dict[int, list[tuple[int, np.ndarray]]] = {}
    for tk, row in rows:
        by_len.setdefault(row.shape[0], []).append((tk, row))
    groups = []
    for M in sorted(by_len):
        items = by_len[M]
        tk = np.array([t for t, _ in items], dtype=np.int64)
        psi = np.array([r for _, r in items], dtype=complex)
        j = np.arange(M)
        if conv is PhaseConvention.LITERAL:
            phase = _QUARTER[(tk[:, None] + 2 * j[None, :]) % 4]  # e^{i pi mu}
        else:
            phase = np.where(j % 2 == 0, 1.0, -1.0)[None, :]  # e^{i pi (mu - k)}
        groups.append(_Group(tk, psi, psi * phase, M))
    return groups


def _thread_count(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("SU11_THREADS", "0")
        try:
            threads = int(env)
        except ValueError:
            threads = 0
    if threads <= 0:
        threads = os.cpu_count() or 1
    return max(1, threads)


def _coefficients(groups: list[_Group], taus: np.ndarray, threads: int) -> tuple[np.ndarray, int]:
    """Fourier coefficients ``C[t, delta + off]`` of W at each ``tau``."""
    m_max = max((g.size for g in groups), default=1)
    off = m_max - 1
    coeff = np.zeros((taus.shape[0], 2 * m_max - 1), dtype=complex)
    if not groups or taus.size == 0:
        return coeff, off
    angles = 2.0 * taus  # the kernel carries d(2 tau)
    for g in groups:
        M = g.size
        R = g.twice_k.shape[0]
        rows_per_chunk = max(1, _CHUNK_ELEMENTS // (M * M))
        for r0 in range(0, R, rows_per_chunk):
            r1 = min(R, r0 + rows_per_chunk)
            tables = band_tables(g.twice_k[r0:r1], M)
            lower, upper = g.cross_terms(r0, r1)
            lo_re, lo_im = np.ascontiguousarray(lower.real), np.ascontiguousarray(lower.imag)
            up_re, up_im = np.ascontiguousarray(upper.real), np.ascontiguousarray(upper.imag)
            t_chunk = max(1, _CHUNK_ELEMENTS // ((r1 - r0) * M * M))
            spans = [(t0, min(taus.shape[0], t0 + t_chunk)) for t0 in range(0, taus.shape[0], t_chunk)]

            def work(span, tables=tables, lo_re=lo_re, lo_im=lo_im, up_re=up_re, up_im=up_im, M=M):
                t0, t1 = span
                e = band_values(tables, angles[t0:t1])
                lo = np.einsum("trnd,rnd->td", e, lo_re) + 1j * np.einsum("trnd,rnd->td", e, lo_im)
                up = np.einsum("trnd,rnd->td", e, up_re) + 1j * np.einsum("trnd,rnd->td", e, up_im)
                return span, lo, up

            if threads > 1 and len(spans) > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    results = list(pool.map(work, spans))
            else:
                results = [work(s) for s in spans]
            for (t0, t1), lo, up in results:  # fixed order: deterministic sums
                coeff[t0:t1, off : off + M] += lo
                coeff[t0:t1, off - M + 1 : off][:, ::-1] += up[:, 1:]
    return coeff, off


def wigner_values(
    state: DecomposedState,
    tau,
    chi,
    conv: PhaseConvention | str = PhaseConvention.LITERAL,
    tol: float = DEFAULT_TAIL_TOL,
    threads: int | None = None,
) -> np.ndarray:
    """Evaluate W at arrays of ``(tau, chi)``.

    Points sharing a ``tau`` share one set of Fourier coefficients. The result
    does not depend on the number of threads.
    """
    conv = PhaseConvention.parse(conv)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    chi = np.atleast_1d(np.asarray(chi, dtype=float))
    if tau.shape != chi.shape:
        raise ValueError("tau and chi must have the same shape")
    if np.any(~np.isfinite(tau)) or np.any(tau < 0):
        raise ValueError("tau must be finite and >= 0")
    groups = _pack(state, conv, tol)
    out = np.zeros(tau.shape, dtype=complex)
    if not groups:
        return out
    uniq, inverse = np.unique(tau, return_inverse=True)
    coeff, off = _coefficients(groups, uniq, _thread_count(threads))
    delta = np.arange(-off, off + 1)
    flat_chi = chi.ravel()
    flat_inv = inverse.ravel()
    res = np.empty(flat_chi.shape, dtype=complex)
    step = max(1, _CHUNK_ELEMENTS // max(1, delta.size))
    for p0 in range(0, flat_chi.size, step):
        p1 = min(flat_chi.size, p0 + step)
        ph = np.exp(1j * np.outer(flat_chi[p0:p1], delta))
        res[p0:p1] = np.sum(coeff[flat_inv[p0:p1]] * ph, axis=1)
    return res.reshape(tau.shape)


def wigner_point(
    state: DecomposedState,
    point: HyperboloidPoint,
    conv: PhaseConvention | str = PhaseConvention.LITERAL,
    tol: float = DEFAULT_TAIL_TOL,
) -> complex:
    """Wigner function of ``state`` at one point.

    Examples
    --------
    >>> from su11wigner.states import build_tmsv, decompose
    >>> vac = decompose(build_tmsv(0.0))
    >>> wigner_point(vac, HyperboloidPoint(0.0, 0.0))
    2j
    """
    return complex(wigner_values(state, [point.tau], [point.chi], conv, tol, threads=1)[0])


def wigner_grid(
    state: DecomposedState,
    grid: GridSpec,
    conv: PhaseConvention | str = PhaseConvention.LITERAL,
    tol: float = DEFAULT_TAIL_TOL,
    threads: int | None = None,
) -> WignerField:
    """Evaluate W at every point of ``grid``."""
    conv = PhaseConvention.parse(conv)
    pts = grid.points()
    vals = wigner_values(state, pts.tau, pts.chi, conv, tol, threads)
    meta = dict(state.metadata)
    meta["fold"] = state.fold
    return WignerField(grid, vals, conv, meta)


def wigner_of_two_mode(
    state: TwoModeState,
    point: HyperboloidPoint,
    conv: PhaseConvention | str = PhaseConvention.LITERAL,
    fold: str = "sectors",
    tol: float = DEFAULT_TAIL_TOL,
) -> complex:
    """Decompose a Fock-basis state, then evaluate it with :func:`wigner_point`."""
    from .states import decompose

    return wigner_point(decompose(state, fold=fold), point, conv, tol)
