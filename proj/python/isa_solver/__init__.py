"""Python face of the inexact-projection subgradient solver."""

from _isa import *  # noqa: F401,F403
from _isa import __doc__ as _core_doc

__doc__ = _core_doc
