"""Hierarchical hotplug coded caching: array construction, verification
and delivery simulation on real bytes."""

try:
    from ._hotcache import *  # noqa: F401,F403  (wheel layout)
    from ._hotcache import __version__  # noqa: F401
except ImportError:  # pragma: no cover - build-tree layout
    from _hotcache import *  # noqa: F401,F403
    from _hotcache import __version__  # noqa: F401
