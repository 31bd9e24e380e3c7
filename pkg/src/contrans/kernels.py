"""Backend selection for the evaluation kernel.

The compiled extension is used when it imports; set ``CONTRANS_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from . import _pykernels

BACKENDS = {"python": _pykernels.eval_program}

try:
    from . import _ckernels
except ImportError:
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels.eval_program

if _ckernels is not None and not os.environ.get("CONTRANS_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"

eval_program = BACKENDS[BACKEND]


def use_backend(name: str) -> None:
    """Switch the process-wide kernel (``"cython"`` or ``"python"``)."""
    global BACKEND, eval_program
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    BACKEND = name
    eval_program = BACKENDS[name]
