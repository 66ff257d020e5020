"""Kernel backend selection.

Imports the compiled Dormand-Prince core when the extension was built,
otherwise falls back to the pure-Python twin.  Set ``AFDO_PURE_PYTHON=1``
to force the fallback (used by the parity tests and the benchmark).
"""

import os

if os.environ.get("AFDO_PURE_PYTHON") == "1":
    from . import _kernel_py as backend
else:
    try:
        from . import _kernel as backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as backend

advance = backend.advance
COMPILED = backend.COMPILED
STATUS_OK = backend.STATUS_OK
STATUS_ESCAPED = backend.STATUS_ESCAPED
