from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import erf


@dataclass
class ExperimentReport:
    family: str
    params: dict[str, Any]
    value: Any
    reference: Any
    tolerance: float
    passed: bool
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "value": self.value,
            "reference": self.reference,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class StepProfile:
    """Monotone profile F with F(-inf) = 0 and F(+inf) = winding.

    ``kind`` is 'tanh' (exponential tails, rate 2/scale) or 'erf' (Gaussian
    tails).
    """

    kind: str = "tanh"
    scale: float = 6.0
    winding: float = 1.0

    def __post_init__(self):
        if self.kind not in ("tanh", "erf"):
            raise ValueError("profile kind must be 'tanh' or 'erf'")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        if self.kind == "tanh":
            s = 0.5 * (1.0 + np.tanh(k / self.scale))
        else:
            s = 0.5 * (1.0 + erf(k / self.scale))
        return self.winding * s


def complex_out(z: complex) -> list[float] | float:
    z = complex(z)
    if z.imag == 0:
        return z.real
    return [z.real, z.imag]


def within(a: complex, b: complex, tol: float) -> bool:
    return bool(abs(complex(a) - complex(b)) <= tol) and not math.isnan(abs(complex(a)))
