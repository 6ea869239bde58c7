"""Example states in the two-mode Fock basis and their irrep decomposition.

The Fock state ``|n_a, n_b>`` carries ``k = (|n_a - n_b| + 1)/2`` and
``mu = (n_a + n_b + 1)/2``. Each ``k > 1/2`` is reached from two sectors,
``d = +-(2k - 1)``. How those two copies are stored is chosen by ``fold``:

``"sectors"`` (default)
    Keep both copies as separate rows of the block. This is exact: norms are
    preserved and :func:`recompose` inverts :func:`decompose`.
``"symmetric"``
    Merge mirrored amplitudes as ``(c_{n_a n_b} + c_{n_b n_a}) / sqrt(2)``. The
    merged vector has the norm of the symmetric part only, so states with an
    antisymmetric component lose mass.
``"upper"``
    Keep only ``n_a >= n_b`` and report the discarded mass in the metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import DecomposedState, DiskPoint, HalfInteger, IrrepBlock, TwoModeState
from .oracle import (
    LEAK_TOLERANCE,
    TruncationLeakError,
    assemble_sectors,
    build_operators,
    converge,
    displaced_vacuum,
    sector_vectors,
    squeezed_vacuum,
)

__all__ = [
    "FOLDS",
    "DEFAULT_CUTOFFS",
    "StateSpec",
    "build_tmsv",
    "build_coherent_squeezed",
    "build_su11_coherent",
    "su11_coherent_state",
    "build_raw",
    "build_state",
    "decompose",
    "recompose",
]

FOLDS = ("sectors", "symmetric", "upper")
DEFAULT_CUTOFFS = {"tmsv": 60, "coherent_times_squeezed": 80}
#: Tail mass left beyond an automatically chosen cutoff.
AUTO_TAIL = 1e-14
_AUTO_MAX = 1 << 20
_EXPM_MAX_DIM = 1200


def _renormalise(amps: np.ndarray, provenance: dict, tol_norm: float) -> TwoModeState:
    n2 = float(np.sum(np.abs(amps) ** 2))
    if n2 == 0.0:
        raise ValueError("state has no weight inside the cutoff")
    loss = max(0.0, 1.0 - n2)
    return TwoModeState(amps / math.sqrt(n2), truncation_loss=loss, tol_norm=tol_norm, provenance=provenance)


def build_tmsv(xi: complex, cutoff: int = 60, tol_norm: float = 1e-8) -> TwoModeState:
    """Two-mode squeezed vacuum ``sqrt(1 - |xi|^2) Sum xi^n |n, n>``.

    Parameters
    ----------
    xi : complex
        Disk coordinate, ``|xi| < 1``.
    cutoff : int
        Largest Fock index per mode.

    Returns
    -------
    TwoModeState
        Renormalised after truncation. ``truncation_loss`` equals the
        discarded geometric tail ``|xi|^(2 (cutoff + 1))``.
    """
    xi = DiskPoint(xi).xi
    cutoff = int(cutoff)
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    n = np.arange(cutoff + 1)
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amps[n, n] = math.sqrt(1.0 - abs(xi) ** 2) * xi ** n
    state = _renormalise(amps, {"variant": "tmsv"}, tol_norm)
    tail = abs(xi) ** (2 * (cutoff + 1))
    return TwoModeState(state.amplitudes, truncation_loss=tail, tol_norm=tol_norm, provenance=state.provenance)


def _auto_levels(series: np.ndarray) -> int:
    """Smallest cutoff leaving at most ``AUTO_TAIL`` of ``series`` outside."""
    p = np.abs(series) ** 2
    tail = np.cumsum(p[::-1])[::-1]  # tail[n] = mass on levels >= n
    over = np.nonzero(tail > AUTO_TAIL)[0]
    return int(over[-1]) if over.size else 0


def _factor(kind: str, param: complex, cutoff: int, method: str) -> tuple[np.ndarray, str, float]:
    build = displaced_vacuum if kind == "coherent" else squeezed_vacuum
    if method == "auto":
        if 2 * (cutoff + 1) + 20 <= _EXPM_MAX_DIM:
            vec, leak = build(param, cutoff, "expm")
            if leak < LEAK_TOLERANCE:
                return vec, "expm", leak
        vec, leak = build(param, cutoff, "series")
        return vec, "series", leak
    vec, leak = build(param, cutoff, method)
    return vec, method, leak


def _probe_cutoff(kind: str, param: complex) -> int:
    build = displaced_vacuum if kind == "coherent" else squeezed_vacuum
    size = 64
    while size <= _AUTO_MAX:
        vec, _ = build(param, size, "series")
        # both factors decay at least geometrically past their peak, so a
        # negligible last stretch bounds the mass beyond the probe window
        if float(np.sum(np.abs(vec[-size // 4 :]) ** 2)) < AUTO_TAIL / 10:
            return max(_auto_levels(vec), 1)
        size *= 2
    raise ValueError(f"automatic cutoff for the {kind} factor exceeds {_AUTO_MAX}")


def build_coherent_squeezed(
    alpha: complex,
    xi_sq: complex,
    cutoff: int | tuple[int, int] | str = 80,
    method: str = "auto",
    tol_norm: float = 1e-8,
) -> TwoModeState:
    """Product of a coherent state in mode ``a`` and a squeezed vacuum in mode ``b``.

    Parameters
    ----------
    alpha : complex
        Coherent amplitude of mode ``a``.
    xi_sq : complex
        Single-mode squeeze parameter of mode ``b``. The factor is
        ``exp((xi_sq b^dag^2 - xi_sq* b^2)/2)|0>``; ``|xi_sq|`` is the squeeze
        strength and may exceed one.
    cutoff : int, pair of int, or "auto"
        Largest Fock index per mode. ``"auto"`` picks, per mode, the smallest
        cutoff leaving less than ``1e-14`` of the factor's probability outside.
    method : {"auto", "expm", "series"}
        How each factor is produced (see :func:`su11wigner.oracle.displaced_vacuum`).
        ``"auto"`` uses the dense exponential when its working space is small
        and its leak check passes, and the ladder series otherwise.

    Notes
    -----
    The result is renormalised. ``truncation_loss`` and ``boundary_mass`` are
    recorded, and ``tail_warning`` is set when either exceeds ``1e-6``.
    """
    alpha, xi_sq = complex(alpha), complex(xi_sq)
    if cutoff == "auto":
        cuts = (_probe_cutoff("coherent", alpha), _probe_cutoff("squeezed", xi_sq))
    elif isinstance(cutoff, (tuple, list)):
        cuts = (int(cutoff[0]), int(cutoff[1]))
    else:
        cuts = (int(cutoff), int(cutoff))
    if min(cuts) < 0:
        raise ValueError("cutoffs must be >= 0")
    if method not in ("auto", "expm", "series"):
        raise ValueError(f"unknown method {method!r}")
    va, ma, la = _factor("coherent", alpha, cuts[0], method)
    vb, mb, lb = _factor("squeezed", xi_sq, cuts[1], method)
    prov = {
        "variant": "coherent_times_squeezed",
        "methods": [ma, mb],
        "factor_leaks": [la, lb],
    }
    return _renormalise(np.outer(va, vb), prov, tol_norm)


def su11_coherent_state(k: object, xi: complex, cutoff: int | None = None, tol_norm: float = 1e-8) -> TwoModeState:
    """SU(1,1) coherent state ``S(zeta)|k, k>`` in the two-mode Fock basis.

    The lowest-weight vector is ``|2k - 1, 0>``. The squeeze amplitude is
    ``zeta = artanh|xi| e^{i arg xi}``. The sector exponential is evaluated at
    a working cutoff that is doubled until the retained amplitudes change by
    less than ``1e-12``.
    """
    kk = HalfInteger.of(k)
    if kk.twice < 1:
        raise ValueError("2k must be a positive integer")
    xi = DiskPoint(xi).xi
    d = kk.twice - 1
    cutoff = 60 + kk.twice if cutoff is None else int(cutoff)
    if cutoff < d:
        raise ValueError(f"cutoff {cutoff} cannot hold the lowest weight of k = {kk}")
    levels = cutoff + 1 - d
    r = math.atanh(abs(xi))
    zeta = complex(r * math.cos(math.atan2(xi.imag, xi.real)), r * math.sin(math.atan2(xi.imag, xi.real)))

    def evaluate(n: int) -> np.ndarray:
        sec = build_operators(n).sector(d)
        start = np.zeros(sec.size, dtype=complex)
        start[0] = 1.0
        out = sec.apply_squeeze(zeta, start)
        if sec.size > 2 and float(np.sum(np.abs(out[-2:]) ** 2)) >= LEAK_TOLERANCE:
            raise TruncationLeakError("su11_coherent_state: boundary leak")
        return out[:levels]

    vec, report = converge(evaluate, 2 * cutoff + 40, tol=1e-12, max_cutoff=max(3200, 8 * cutoff))
    amps = assemble_sectors({d: vec}, (cutoff + 1, cutoff + 1))
    prov = {"variant": "su11_coherent", "gate": report.as_dict()}
    return _renormalise(amps, prov, tol_norm)


def build_su11_coherent(k: object, xi: complex, cutoff: int | None = None, fold: str = "sectors") -> DecomposedState:
    """Irrep decomposition of :func:`su11_coherent_state`; a single block."""
    return decompose(su11_coherent_state(k, xi, cutoff), fold=fold)


def build_raw(entries, cutoff: int | None = None, tol_norm: float = 1e-8) -> TwoModeState:
    """State from explicit ``(n_a, n_b, amplitude)`` entries (not renormalised).

    An empty entry list yields the all-zero (empty) state.
    """
    entries = list(entries)
    top = max([max(int(e[0]), int(e[1])) for e in entries], default=0)
    cutoff = top if cutoff is None else int(cutoff)
    if cutoff < top:
        raise ValueError(f"cutoff {cutoff} smaller than largest index {top}")
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for e in entries:
        na, nb, amp = int(e[0]), int(e[1]), complex(e[2])
        if na < 0 or nb < 0:
            raise ValueError("Fock indices must be >= 0")
        amps[na, nb] += amp
    return TwoModeState(amps, tol_norm=tol_norm, provenance={"variant": "raw_amplitudes"})


@dataclass(frozen=True)
class StateSpec:
    """Serializable recipe for one of the supported states.

    ``params`` per variant:

    * ``tmsv``: ``{"xi": complex}``
    * ``coherent_times_squeezed``: ``{"alpha": complex, "xi": complex}``
    * ``su11_coherent``: ``{"k": half-integer, "xi": complex}``
    * ``raw_amplitudes``: ``{"entries": [(n_a, n_b, complex), ...]}``

    ``cutoff`` is an integer, a pair of integers (``coherent_times_squeezed``
    only), ``"auto"`` (``coherent_times_squeezed`` only), or ``None`` for the
    variant default.
    """

    variant: str
    params: dict[str, Any] = field(default_factory=dict)
    cutoff: Any = None

    VARIANTS = ("tmsv", "coherent_times_squeezed", "su11_coherent", "raw_amplitudes")

    def __post_init__(self) -> None:
        if self.variant not in self.VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "params", dict(self.params))
        if self.variant in ("tmsv", "su11_coherent"):
            DiskPoint(complex(self.params["xi"]))
        if self.variant == "su11_coherent":
            if HalfInteger.of(self.params["k"]).twice < 1:
                raise ValueError("k must be >= 1/2")


def build_state(spec: StateSpec) -> TwoModeState:
    """Build the Fock-basis state described by ``spec``."""
    p = spec.params
    if spec.variant == "tmsv":
        cut = DEFAULT_CUTOFFS["tmsv"] if spec.cutoff is None else int(spec.cutoff)
        return build_tmsv(complex(p["xi"]), cut)
    if spec.variant == "coherent_times_squeezed":
        cut = DEFAULT_CUTOFFS["coherent_times_squeezed"] if spec.cutoff is None else spec.cutoff
        return build_coherent_squeezed(complex(p["alpha"]), complex(p["xi"]), cut)
    if spec.variant == "su11_coherent":
        return su11_coherent_state(p["k"], complex(p["xi"]), spec.cutoff)
    return build_raw(p.get("entries", []), spec.cutoff)


def decompose(s: TwoModeState, fold: str = "sectors") -> DecomposedState:
    """Reorganise Fock amplitudes into irrep blocks.

    Parameters
    ----------
    s : TwoModeState
    fold : {"sectors", "symmetric", "upper"}
        Treatment of the two copies of each ``k > 1/2`` (see the module notes).

    Returns
    -------
    DecomposedState
        Blocks in increasing ``k``. Only irreps with nonzero amplitude appear.

    Examples
    --------
    >>> dec = decompose(build_tmsv(0.3))
    >>> [str(b.k) for b in dec.blocks]
    ['1/2']
    """
    if fold not in FOLDS:
        raise ValueError(f"fold must be one of {FOLDS}, got {fold!r}")
    vecs = sector_vectors(s.amplitudes)
    blocks = []
    discarded = 0.0
    for twice_k in sorted({abs(d) + 1 for d in vecs}):
        dpos, dneg = twice_k - 1, -(twice_k - 1)
        pos, neg = vecs.get(dpos), vecs.get(dneg) if dneg != dpos else None
        if fold == "sectors":
            rows = [(d, v) for d, v in ((dpos, pos), (dneg, neg)) if v is not None]
            width = max(v.shape[0] for _, v in rows)
            psi = np.zeros((len(rows), width), dtype=complex)
            for i, (_, v) in enumerate(rows):
                psi[i, : v.shape[0]] = v
            blocks.append(IrrepBlock(HalfInteger(twice_k), psi, tuple(d for d, _ in rows)))
            continue
        if fold == "upper":
            if neg is not None:
                discarded += float(np.sum(np.abs(neg) ** 2))
            if pos is None:
                continue
            blocks.append(IrrepBlock(HalfInteger(twice_k), pos, (dpos,)))
            continue
        # symmetric
        if dpos == 0:
            merged = pos
        else:
            width = max(v.shape[0] for v in (pos, neg) if v is not None)
            merged = np.zeros(width, dtype=complex)
            for v in (pos, neg):
                if v is not None:
                    merged[: v.shape[0]] += v
            merged /= math.sqrt(2.0)
        blocks.append(IrrepBlock(HalfInteger(twice_k), merged, (dpos,)))
    meta = dict(s.metadata())
    meta["shape"] = list(s.amplitudes.shape)
    if fold == "upper":
        meta["discarded_mass"] = discarded
    return DecomposedState(tuple(blocks), fold=fold, metadata=meta)


def recompose(dec: DecomposedState, shape: tuple[int, int] | None = None) -> TwoModeState:
    """Inverse of :func:`decompose` for the exact ``"sectors"`` and ``"upper"`` folds."""
    if dec.fold == "symmetric":
        raise ValueError("the symmetric fold is not invertible")
    if shape is None:
        if "shape" in dec.metadata:
            shape = tuple(dec.metadata["shape"])
        else:
            side = max([b.mu_count + b.k.twice - 1 for b in dec.blocks], default=1)
            shape = (side, side)
    vecs = {}
    for b in dec.blocks:
        for row, d in zip(b.psi, b.differences):
            vecs[d] = row
    return TwoModeState(assemble_sectors(vecs, tuple(shape)), tol_norm=1.0)
