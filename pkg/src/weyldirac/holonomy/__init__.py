"""Numeric parallel transport around closed loops."""

from .kernels import BACKEND, DISABLE_ENV, rk4_linear
from .transport import (DEFAULT_STEPS, Curve, LoopPath, NumericConnection, TransportError,
                        TransportResult, cone_flux, holonomy_defect, length_transport,
                        line_integral, parallelogram, riemann_at, transport)

__all__ = [
    "BACKEND", "DISABLE_ENV", "rk4_linear",
    "DEFAULT_STEPS", "Curve", "LoopPath", "NumericConnection", "TransportError",
    "TransportResult", "cone_flux", "holonomy_defect", "length_transport", "line_integral",
    "parallelogram", "riemann_at", "transport",
]
