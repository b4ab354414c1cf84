"""Backend selection for the ring multiplication kernel.

The compiled ``_ringcore`` extension is used when it was built; setting
``KITAEVLAB_PURE=1`` forces the pure-Python kernel.
"""

import os

from kitaevlab import _ringpy

BACKEND = "python"
mul_parts = _ringpy.mul_parts

if os.environ.get("KITAEVLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from kitaevlab import _ringcore
    except ImportError:
        pass
    else:
        mul_parts = _ringcore.mul_parts
        BACKEND = "compiled"
