"""Growing-network simulators and amortized posterior inference."""

try:
    from netgrow._core import *  # noqa: F401,F403
    from netgrow._core import __doc__ as _core_doc
except ImportError:  # running against a build tree where _core is top-level
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
