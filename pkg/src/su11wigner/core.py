"""Shared value types: half-integers, phase-space coordinates and state containers.

Everything here is immutable after construction. Arrays held by the state
containers are copied and flagged read-only so that instances can be shared
freely between threads.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "HalfInteger",
    "HyperboloidPoint",
    "DiskPoint",
    "SqueezeParameter",
    "TwoModeState",
    "IrrepBlock",
    "DecomposedState",
    "disk_to_hyperboloid",
    "hyperboloid_to_disk",
    "minkowski_vector",
    "exact_phase",
    "TAIL_WARNING_THRESHOLD",
]

#: Boundary or truncation mass above which a state carries a tail warning.
TAIL_WARNING_THRESHOLD = 1e-6

# e^{i pi x} for x = twice/2, indexed by twice mod 4. Exact, no rounding.
_QUARTER_PHASES = (1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j)


def exact_phase(twice: int) -> complex:
    """Return ``exp(i*pi*twice/2)`` exactly (one of 1, i, -1, -i)."""
    return _QUARTER_PHASES[twice % 4]


@dataclass(frozen=True, order=True)
class HalfInteger:
    """An exact multiple of 1/2, stored as ``twice`` the value.

    Parameters
    ----------
    twice : int
        Twice the represented value.

    Examples
    --------
    >>> HalfInteger.of("3/2") + HalfInteger.of(1)
    HalfInteger(twice=5)
    >>> float(HalfInteger.of("1/2"))
    0.5
    """

    twice: int

    def __post_init__(self) -> None:
        if isinstance(self.twice, bool) or not isinstance(self.twice, numbers.Integral):
            raise TypeError(f"twice must be an integer, got {self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def of(cls, value: object) -> "HalfInteger":
        """Parse ``value`` into a half-integer.

        Accepts another ``HalfInteger``, integers, ``Fraction`` objects, floats
        that are exact multiples of 1/2, and strings such as ``"3"``, ``"1/2"``,
        ``"-5/2"`` or ``"1.5"``.
        """
        if isinstance(value, HalfInteger):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not half-integers")
        if isinstance(value, numbers.Integral):
            return cls(2 * int(value))
        if isinstance(value, str):
            text = "".join(value.split())
            if not text:
                raise ValueError("empty half-integer literal")
            try:
                frac = Fraction(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"malformed half-integer literal {value!r}") from exc
            return cls._from_fraction(frac, value)
        if isinstance(value, Fraction):
            return cls._from_fraction(value, value)
        if isinstance(value, numbers.Real):
            x = float(value)
            if not math.isfinite(x) or (2.0 * x) != math.floor(2.0 * x):
                raise ValueError(f"{value!r} is not a multiple of 1/2")
            return cls(int(2.0 * x))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @classmethod
    def _from_fraction(cls, frac: Fraction, original: object) -> "HalfInteger":
        doubled = 2 * frac
        if doubled.denominator != 1:
            raise ValueError(f"{original!r} is not a multiple of 1/2")
        return cls(doubled.numerator)

    def __add__(self, other: object) -> "HalfInteger":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return HalfInteger(self.twice + other.twice)

    __radd__ = __add__

    def __sub__(self, other: object) -> "HalfInteger":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return HalfInteger(self.twice - other.twice)

    def __rsub__(self, other: object) -> "HalfInteger":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return HalfInteger(other.twice - self.twice)

    def __neg__(self) -> "HalfInteger":
        return HalfInteger(-self.twice)

    def __float__(self) -> float:
        return self.twice / 2

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def phase(self) -> complex:
        """Exact ``exp(i*pi*self)``."""
        return exact_phase(self.twice)

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def _coerce(value: object) -> HalfInteger | None:
    if isinstance(value, HalfInteger):
        return value
    if isinstance(value, numbers.Integral) and not isinstance(value, bool):
        return HalfInteger(2 * int(value))
    return None


def _canonical_angle(chi: float) -> float:
    # Map onto (-pi, pi]; math.remainder lands in [-pi, pi].
    c = math.remainder(chi, 2.0 * math.pi)
    if c <= -math.pi:
        c += 2.0 * math.pi
    return c


@dataclass(frozen=True)
class HyperboloidPoint:
    """Point ``(tau, chi)`` on the upper sheet of the hyperboloid.

    ``chi`` is folded into ``(-pi, pi]`` and forced to ``0`` at the apex.
    """

    tau: float
    chi: float = 0.0

    def __post_init__(self) -> None:
        tau = float(self.tau)
        chi = float(self.chi)
        if not (math.isfinite(tau) and tau >= 0.0):
            raise ValueError(f"tau must be finite and >= 0, got {self.tau!r}")
        if not math.isfinite(chi):
            raise ValueError(f"chi must be finite, got {self.chi!r}")
        chi = 0.0 if tau == 0.0 else _canonical_angle(chi)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "chi", chi)

    @property
    def squeeze(self) -> "SqueezeParameter":
        return SqueezeParameter.from_point(self)


@dataclass(frozen=True)
class DiskPoint:
    """Point of the open unit disk, ``|xi| < 1``."""

    xi: complex

    def __post_init__(self) -> None:
        xi = complex(self.xi)
        if not (math.isfinite(xi.real) and math.isfinite(xi.imag)):
            raise ValueError(f"xi must be finite, got {self.xi!r}")
        if abs(xi) >= 1.0:
            raise ValueError(f"|xi| must be < 1, got |{xi}| = {abs(xi)}")
        object.__setattr__(self, "xi", xi)


@dataclass(frozen=True)
class SqueezeParameter:
    """Squeeze amplitude ``zeta = (tau/2) e^{i chi}`` tied to a hyperboloid point."""

    zeta: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "zeta", complex(self.zeta))

    @classmethod
    def from_point(cls, p: HyperboloidPoint) -> "SqueezeParameter":
        r = 0.5 * p.tau
        return cls(complex(r * math.cos(p.chi), r * math.sin(p.chi)))

    def to_point(self) -> HyperboloidPoint:
        return HyperboloidPoint(2.0 * abs(self.zeta), math.atan2(self.zeta.imag, self.zeta.real))


def disk_to_hyperboloid(p: DiskPoint) -> HyperboloidPoint:
    """Invert the stereographic map ``xi = tanh(tau/2) e^{i chi}``."""
    xi = p.xi
    r = abs(xi)
    if r == 0.0:
        return HyperboloidPoint(0.0, 0.0)
    return HyperboloidPoint(2.0 * math.atanh(r), math.atan2(xi.imag, xi.real))


def hyperboloid_to_disk(p: HyperboloidPoint) -> DiskPoint:
    """Project a hyperboloid point onto the unit disk."""
    r = math.tanh(0.5 * p.tau)
    return DiskPoint(complex(r * math.cos(p.chi), r * math.sin(p.chi)))


def minkowski_vector(p: HyperboloidPoint) -> tuple[float, float, float]:
    """Return ``(cosh tau, sinh tau cos chi, sinh tau sin chi)``."""
    s = math.sinh(p.tau)
    return (math.cosh(p.tau), s * math.cos(p.chi), s * math.sin(p.chi))


def _frozen_array(values: object, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=complex, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Pure two-mode state in a truncated Fock basis.

    Parameters
    ----------
    amplitudes : array_like of complex, shape (Na+1, Nb+1)
        Coefficient of ``|n_a, n_b>`` at index ``[n_a, n_b]``. The two cutoffs
        may differ; a square array corresponds to a single cutoff ``N``.
    truncation_loss : float, optional
        Probability mass that was discarded (before renormalisation) when the
        state was truncated to this basis.
    tol_norm : float, optional
        Allowed deviation of the squared norm from one. The all-zero state is
        accepted as the empty state.
    provenance : dict, optional
        Free-form description of how the state was built.
    """

    amplitudes: np.ndarray
    truncation_loss: float = 0.0
    tol_norm: float = 1e-8
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        amps = _frozen_array(self.amplitudes, 2, "amplitudes")
        if amps.shape[0] < 1 or amps.shape[1] < 1:
            raise ValueError("amplitudes must have at least one entry per mode")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "provenance", dict(self.provenance))
        if not (self.tol_norm > 0):
            raise ValueError("tol_norm must be positive")
        if not (self.truncation_loss >= 0):
            raise ValueError("truncation_loss must be nonnegative")
        n2 = self.norm_squared
        if n2 != 0.0 and abs(n2 - 1.0) > self.tol_norm:
            raise ValueError(f"squared norm {n2!r} outside 1 +/- {self.tol_norm}")

    @property
    def cutoff_a(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def cutoff_b(self) -> int:
        return self.amplitudes.shape[1] - 1

    @property
    def cutoff(self) -> int:
        """Largest Fock index kept in either mode."""
        return max(self.cutoff_a, self.cutoff_b)

    @cached_property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def is_empty(self) -> bool:
        return self.norm_squared == 0.0

    @cached_property
    def boundary_mass(self) -> float:
        """Probability on the shells ``n_a = Na`` or ``n_b = Nb``."""
        p = np.abs(self.amplitudes) ** 2
        return float(p[-1, :].sum() + p[:-1, -1].sum())

    @property
    def tail_warning(self) -> bool:
        return max(self.boundary_mass, self.truncation_loss) > TAIL_WARNING_THRESHOLD

    def metadata(self) -> dict:
        return {
            "cutoffs": [self.cutoff_a, self.cutoff_b],
            "boundary_mass": self.boundary_mass,
            "truncation_loss": self.truncation_loss,
            "tail_warning": self.tail_warning,
            **self.provenance,
        }


@dataclass(frozen=True, eq=False)
class IrrepBlock:
    """Amplitudes of one positive discrete-series irrep ``k``.

    The two-mode space contains the irrep ``k`` once for every Fock sector
    ``n_a - n_b = d`` with ``|d| = 2k - 1``, so ``k = 1/2`` appears once and every
    other ``k`` twice. ``psi`` has one row per copy; ``psi[c, j]`` is the
    amplitude of ``mu = k + j`` in copy ``c``, and ``differences[c]`` records
    which sector the copy came from.
    """

    k: HalfInteger
    psi: np.ndarray
    differences: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        k = HalfInteger.of(self.k)
        if k.twice < 1:
            raise ValueError(f"k must be >= 1/2, got {k}")
        object.__setattr__(self, "k", k)
        psi = np.array(self.psi, dtype=complex)
        if psi.ndim == 1:
            psi = psi[None, :]
        psi = _frozen_array(psi, 2, "psi")
        if psi.shape[0] < 1 or psi.shape[1] < 1:
            raise ValueError("psi must hold at least one copy and one weight")
        object.__setattr__(self, "psi", psi)
        diffs = tuple(int(d) for d in self.differences) or (k.twice - 1,) * psi.shape[0]
        if len(diffs) != psi.shape[0]:
            raise ValueError("one difference label is required per copy")
        if any(abs(d) != k.twice - 1 for d in diffs):
            raise ValueError(f"sector differences {diffs} incompatible with k = {k}")
        object.__setattr__(self, "differences", diffs)

    @property
    def mu_count(self) -> int:
        return self.psi.shape[1]

    @property
    def copies(self) -> int:
        return self.psi.shape[0]

    def mu(self, j: int) -> HalfInteger:
        return self.k + j

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2))


@dataclass(frozen=True, eq=False)
class DecomposedState:
    """A state written as a direct sum of irrep blocks, sorted by ``k``.

    Parameters
    ----------
    blocks : sequence of IrrepBlock
        Blocks with strictly increasing ``k``.
    fold : str
        Name of the convention that produced the blocks (see
        :func:`su11wigner.states.decompose`).
    metadata : dict
        Provenance of the source state (cutoffs, tail masses).
    """

    blocks: tuple[IrrepBlock, ...]
    fold: str = "sectors"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        blocks = tuple(self.blocks)
        for b in blocks:
            if not isinstance(b, IrrepBlock):
                raise TypeError("blocks must be IrrepBlock instances")
        for lo, hi in zip(blocks, blocks[1:]):
            if not lo.k < hi.k:
                raise ValueError("blocks must have strictly increasing k")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __iter__(self) -> Iterator[IrrepBlock]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def norm_squared(self) -> float:
        return float(sum(b.norm_squared for b in self.blocks))

    @property
    def is_empty(self) -> bool:
        return self.norm_squared == 0.0

    def block(self, k: object) -> IrrepBlock | None:
        kk = HalfInteger.of(k)
        for b in self.blocks:
            if b.k == kk:
                return b
        return None

    def ks(self) -> Sequence[HalfInteger]:
        return [b.k for b in self.blocks]
