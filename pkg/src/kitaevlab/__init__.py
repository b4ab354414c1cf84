"""Finite-section Fredholm determinants, a Steinberg-word proof checker over
the universal Kitaev ring, and quantized traces on a Hofstadter lattice."""

from kitaevlab._kernels import BACKEND
from kitaevlab.symring import RingElement, ring_eval, ring_parse, render
from kitaevlab.steinberg import check_script, load_builtin, script_parse

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "RingElement",
    "check_script",
    "load_builtin",
    "render",
    "ring_eval",
    "ring_parse",
    "script_parse",
]
