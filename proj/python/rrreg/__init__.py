"""Risk-ratio regression toolkit: python bindings over the C++ core."""

try:
    from ._rrreg import *  # noqa: F401,F403  (installed package layout)
    from ._rrreg import __doc__ as _doc
except ImportError:  # in-tree build: extension on PYTHONPATH
    from _rrreg import *  # noqa: F401,F403
    from _rrreg import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
