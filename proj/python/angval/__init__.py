from angval._core import *  # noqa: F401,F403
from angval._core import __version__  # noqa: F401
