"""Balanced SU(1,1) interferometer: amplifier, phase shift, de-amplifier.

The device acts as ``T = S(zeta) exp(i Phi K0) S(zeta)^dag`` with
``zeta = gain e^{i pump_phase}``. Two routes give the output Wigner function:

* covariant: ``W_out(xi) = W_in(g^{-1} xi)`` with ``g`` from
  :func:`su11wigner.geometry.interferometer_element`;
* direct: propagate the Fock amplitudes sector by sector and evaluate the
  output state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DecomposedState, TwoModeState
from .geometry import GroupElement, interferometer_element, mobius_apply_inverse_array
from .oracle import (
    GATE_TOLERANCE,
    LEAK_TOLERANCE,
    TruncationLeakError,
    build_operators,
    converge,
    sector_vectors,
)
from .wigner import DEFAULT_TAIL_TOL, GridSpec, PhaseConvention, WignerField, coords_from_xi, wigner_values

__all__ = ["InterferometerConfig", "output_wigner_covariant", "output_state_direct"]


@dataclass(frozen=True)
class InterferometerConfig:
    """Gain and phases of a balanced interferometer."""

    gain: float
    pump_phase: float = 0.0
    total_phase: float = 0.0

    def __post_init__(self) -> None:
        for name in ("gain", "pump_phase", "total_phase"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.gain < 0:
            raise ValueError("gain must be >= 0")

    @property
    def zeta(self) -> complex:
        return complex(self.gain * math.cos(self.pump_phase), self.gain * math.sin(self.pump_phase))

    def group_element(self) -> GroupElement:
        return interferometer_element(self.gain, self.pump_phase, self.total_phase)

    def to_dict(self) -> dict:
        return {"gain": self.gain, "pump_phase": self.pump_phase, "total_phase": self.total_phase}


def output_wigner_covariant(
    state: DecomposedState,
    cfg: InterferometerConfig,
    grid: GridSpec,
    conv: PhaseConvention | str = PhaseConvention.LITERAL,
    tol: float = DEFAULT_TAIL_TOL,
    threads: int | None = None,
) -> WignerField:
    """Output Wigner field obtained by pulling each grid point back through ``g``.

    With ``total_phase = 0`` the element is the identity, and the result is
    bit-identical to :func:`su11wigner.wigner.wigner_grid`.
    """
    conv = PhaseConvention.parse(conv)
    pts = grid.points()
    g = cfg.group_element()
    if g.is_identity():
        tau, chi = pts.tau, pts.chi
    else:
        tau, chi = coords_from_xi(mobius_apply_inverse_array(g, pts.xi))
    vals = wigner_values(state, tau, chi, conv, tol, threads)
    meta = dict(state.metadata)
    meta.update({"fold": state.fold, "route": "covariant", "interferometer": cfg.to_dict()})
    return WignerField(grid, vals, conv, meta)


def output_state_direct(
    state: TwoModeState,
    cfg: InterferometerConfig,
    out_cutoff: int | None = None,
    tol: float = GATE_TOLERANCE,
) -> TwoModeState:
    """Propagate Fock amplitudes through ``S(zeta) exp(i Phi K0) S(zeta)^dag``.

    Parameters
    ----------
    state : TwoModeState
        Input state.
    cfg : InterferometerConfig
        Device parameters.
    out_cutoff : int, optional
        Cutoff of the returned state; defaults to ``max(2 N, N + 40)`` for an
        input cutoff ``N``.
    tol : float
        Convergence gate on the output amplitudes under doubling of the
        working cutoff.

    Returns
    -------
    TwoModeState
        Renormalised output; the mass found outside ``out_cutoff`` is stored
        as ``truncation_loss`` and the gate outcome in the provenance.

    Raises
    ------
    TruncationLeakError
        If no working cutoff keeps both squeezes away from the boundary.
    """
    vecs = sector_vectors(state.amplitudes)
    n_in = state.cutoff
    n_out = max(2 * n_in, n_in + 40) if out_cutoff is None else int(out_cutoff)
    if n_out < n_in:
        raise ValueError("out_cutoff must not be below the input cutoff")
    zeta = cfg.zeta
    phi = cfg.total_phase

    def evaluate(n: int) -> np.ndarray:
        if n < n_out:
            raise TruncationLeakError("working cutoff below output cutoff")
        ops = build_operators(n)
        out = np.zeros((n_out + 1, n_out + 1), dtype=complex)
        for d, v in vecs.items():
            sec = ops.sector(d)
            padded = np.zeros(sec.size, dtype=complex)
            padded[: v.shape[0]] = v
            y = sec.apply_squeeze(zeta, padded, adjoint=True)
            if sec.size > 2 and float(np.sum(np.abs(y[-2:]) ** 2)) >= LEAK_TOLERANCE:
                raise TruncationLeakError("first amplifier leaks")
            y *= np.exp(1j * phi * sec.twice_mu / 2.0)
            z = sec.apply_squeeze(zeta, y)
            if sec.size > 2 and float(np.sum(np.abs(z[-2:]) ** 2)) >= LEAK_TOLERANCE:
                raise TruncationLeakError("second amplifier leaks")
            keep = (sec.na <= n_out) & (sec.nb <= n_out)
            out[sec.na[keep], sec.nb[keep]] = z[keep]
        return out

    amps, report = converge(evaluate, max(2 * n_out, n_out + 40), tol)
    norm_in = state.norm_squared
    kept = float(np.sum(np.abs(amps) ** 2))
    loss = max(0.0, 1.0 - kept / norm_in) if norm_in else 0.0
    prov = dict(state.provenance)
    prov.update({"interferometer": cfg.to_dict(), "gate": report.as_dict()})
    if norm_in == 0.0:
        return TwoModeState(amps, provenance=prov)
    return TwoModeState(amps / math.sqrt(kept), truncation_loss=loss, tol_norm=state.tol_norm, provenance=prov)
