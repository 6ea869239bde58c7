"""SU(1,1) group elements and their Möbius action on the unit disk.

An element is stored as the pair ``(alpha, beta)`` of the matrix
``[[alpha, beta], [beta*, alpha*]]`` with ``|alpha|^2 - |beta|^2 = 1``.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass

import numpy as np

from .core import DiskPoint

__all__ = [
    "GroupElement",
    "IDENTITY",
    "su11_element",
    "interferometer_element",
    "compose",
    "inverse",
    "mobius_apply",
    "mobius_apply_inverse",
    "mobius_apply_inverse_array",
]

_RENORM_LIMIT = 1e-9


@dataclass(frozen=True)
class GroupElement:
    """SU(1,1) element.

    Determinant drift up to ``1e-9`` (relative to ``|alpha|^2 + |beta|^2``) is
    rescaled away on construction; drift at the rounding level is left alone,
    since the computed determinant is no more accurate than that.
    """

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        a, b = complex(self.alpha), complex(self.beta)
        det = abs(a) ** 2 - abs(b) ** 2
        # |alpha|^2 - |beta|^2 cancels, so drift is judged against its scale
        scale = abs(a) ** 2 + abs(b) ** 2
        if not math.isfinite(det) or abs(det - 1.0) > _RENORM_LIMIT * scale:
            raise ValueError(f"|alpha|^2 - |beta|^2 = {det!r} is not 1")
        if abs(det - 1.0) > 16 * sys.float_info.epsilon * scale:
            s = 1.0 / math.sqrt(det)
            a, b = a * s, b * s
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def determinant(self) -> float:
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2

    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, b], [b.conjugate(), a.conjugate()]])

    def is_identity(self) -> bool:
        return self.alpha == 1.0 and self.beta == 0.0


IDENTITY = GroupElement(1.0, 0.0)


def su11_element(tau: float, chi: float, phi: float) -> GroupElement:
    """``alpha = cos(phi/2) + i sin(phi/2) cosh tau``, ``beta = i e^{i chi} sin(phi/2) sinh tau``."""
    c, s = math.cos(0.5 * phi), math.sin(0.5 * phi)
    alpha = complex(c, s * math.cosh(tau))
    beta = 1j * cmath.exp(1j * chi) * s * math.sinh(tau)
    return GroupElement(alpha, beta)


def interferometer_element(gain: float, pump_phase: float, total_phase: float) -> GroupElement:
    """Group element of the balanced interferometer.

    The two amplifiers act as ``S(zeta)`` and ``S(zeta)^dag`` with
    ``zeta = gain e^{i pump_phase}``, and the arms add ``exp(i Phi K0)``.
    Conjugating the rotation by the squeeze gives the element of
    :func:`su11_element` with ``tau = 2 gain`` and ``chi = pump_phase + pi``.
    Equivalently ``beta = -i e^{i pump_phase} sin(Phi/2) sinh(2 gain)``.

    Parameters
    ----------
    gain : float
        Squeeze strength of each amplifier, ``>= 0``.
    pump_phase : float
        Pump phase of the first amplifier.
    total_phase : float
        Total phase ``Phi`` accumulated in the two arms.
    """
    gain = float(gain)
    if not (math.isfinite(gain) and gain >= 0.0):
        raise ValueError("gain must be finite and >= 0")
    return su11_element(2.0 * gain, float(pump_phase) + math.pi, float(total_phase))


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """Matrix product ``g1 g2``."""
    a = g1.alpha * g2.alpha + g1.beta * g2.beta.conjugate()
    b = g1.alpha * g2.beta + g1.beta * g2.alpha.conjugate()
    return GroupElement(a, b)


def inverse(g: GroupElement) -> GroupElement:
    """``g^{-1} = [[alpha*, -beta], [-beta*, alpha]]``."""
    return GroupElement(g.alpha.conjugate(), -g.beta)


def mobius_apply_inverse_array(g: GroupElement, xi) -> np.ndarray:
    """Vectorised ``g^{-1} xi = (-alpha* xi + beta) / (beta* xi - alpha)``."""
    xi = np.asarray(xi, dtype=complex)
    if g.is_identity():
        return xi.copy()
    a, b = g.alpha, g.beta
    den = b.conjugate() * xi - a
    if np.any(den == 0):
        raise ZeroDivisionError("Möbius denominator vanished")
    return (-a.conjugate() * xi + b) / den


def mobius_apply_inverse(g: GroupElement, xi: DiskPoint) -> DiskPoint:
    """Image of a disk point under ``g^{-1}``."""
    return DiskPoint(complex(mobius_apply_inverse_array(g, xi.xi)))


def mobius_apply(g: GroupElement, xi: DiskPoint) -> DiskPoint:
    """Image of a disk point under ``g``."""
    return mobius_apply_inverse(inverse(g), xi)
