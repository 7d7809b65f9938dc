"""Pick the compiled kernels when importable, else the numpy fallback.

Set RACKMSR_BACKEND=python to force the fallback.
"""

import os

from . import _pycore

if os.environ.get("RACKMSR_BACKEND", "").lower() == "python":
    core = _pycore
    name = "python"
else:
    try:
        from . import _gfcore as core
        name = "cython"
    except ImportError:
        core = _pycore
        name = "python"

matmul = core.matmul
eliminate = core.eliminate
