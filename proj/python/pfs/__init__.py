"""Mixed free-surface / pressurized pipe flow solver."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, preset, run

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]


def run_preset(name, **overrides):
    """Run a built-in scenario; keyword arguments override SimConfig fields."""
    config = preset(name)
    for key, value in overrides.items():
        if not hasattr(config, key):
            raise AttributeError(f"SimConfig has no field {key!r}")
        setattr(config, key, value)
    if "cells" in overrides:
        config.probes = []
    return run(config)
