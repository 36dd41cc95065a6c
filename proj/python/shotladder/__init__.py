"""Per-shot bitrate/quality ladder prediction toolkit."""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
    from ._core import __version__  # noqa: F401
except ImportError:  # in-tree CMake build with build/bindings on sys.path
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
