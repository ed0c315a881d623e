"""Structure-preserving solver for rotating two-component shallow-water waves."""

from ._core import *  # noqa: F401,F403
