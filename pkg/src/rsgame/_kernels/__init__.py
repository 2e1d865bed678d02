"""Backend selection for the simplex kernel.

The compiled Cython kernel is used when available; otherwise the
pure-Python twin. Set ``RSGAME_BACKEND=python`` or ``RSGAME_BACKEND=c``
to force a backend (forcing ``c`` fails loudly if the extension is not
built).
"""

import os

_requested = os.environ.get("RSGAME_BACKEND", "").strip().lower()
if _requested not in ("", "c", "python"):
    raise ImportError(
        f"RSGAME_BACKEND must be 'c' or 'python', got {_requested!r}"
    )

if _requested == "python":
    from . import _simplex_py as _impl
else:
    try:
        from . import _simplex_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "c":
            raise ImportError(
                "RSGAME_BACKEND=c but the compiled kernel is not built; "
                "reinstall with a C compiler available"
            )
        from . import _simplex_py as _impl

backend_name: str = _impl.name
solve_positive_game = _impl.solve_positive_game
STATUS_OK = _impl.STATUS_OK
STATUS_PIVOT_LIMIT = _impl.STATUS_PIVOT_LIMIT
STATUS_NO_PIVOT = _impl.STATUS_NO_PIVOT
