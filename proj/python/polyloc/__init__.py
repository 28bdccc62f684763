"""Python access to the polyloc core library."""

from ._polyloc import *  # noqa: F401,F403
from ._polyloc import __doc__  # noqa: F401
