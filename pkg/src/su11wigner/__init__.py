"""SU(1,1) Wigner functions of two-mode bosonic states.

The package evaluates the SU(1,1) Wigner function on the unit disk (or the
upper hyperboloid sheet), propagates states through balanced SU(1,1)
interferometers, and cross-checks every closed form against truncated-Fock
computations.
"""

__version__ = "0.1.0"

from .core import (
    DecomposedState,
    DiskPoint,
    HalfInteger,
    HyperboloidPoint,
    IrrepBlock,
    SqueezeParameter,
    TwoModeState,
    disk_to_hyperboloid,
    hyperboloid_to_disk,
    minkowski_vector,
)
from .geometry import GroupElement, compose, interferometer_element, inverse, mobius_apply, mobius_apply_inverse, su11_element
from .interferometer import InterferometerConfig, output_state_direct, output_wigner_covariant
from .special import DFunctionQuery, dfunction, dfunction_matrix, gauss_2f1_terminating, log_gamma
from .states import (
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
from .wigner import GridSpec, PhaseConvention, WignerField, wigner_grid, wigner_point, wigner_values

__all__ = [
    "__version__",
    "DecomposedState",
    "DiskPoint",
    "HalfInteger",
    "HyperboloidPoint",
    "IrrepBlock",
    "SqueezeParameter",
    "TwoModeState",
    "disk_to_hyperboloid",
    "hyperboloid_to_disk",
    "minkowski_vector",
    "GroupElement",
    "compose",
    "interferometer_element",
    "inverse",
    "mobius_apply",
    "mobius_apply_inverse",
    "su11_element",
    "InterferometerConfig",
    "output_state_direct",
    "output_wigner_covariant",
    "DFunctionQuery",
    "dfunction",
    "dfunction_matrix",
    "gauss_2f1_terminating",
    "log_gamma",
    "StateSpec",
    "build_coherent_squeezed",
    "build_raw",
    "build_state",
    "build_su11_coherent",
    "build_tmsv",
    "decompose",
    "recompose",
    "su11_coherent_state",
    "GridSpec",
    "PhaseConvention",
    "WignerField",
    "wigner_grid",
    "wigner_point",
    "wigner_values",
]
