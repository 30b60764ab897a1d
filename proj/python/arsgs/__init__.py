from ._arsgs import *  # noqa: F401,F403
from ._arsgs import __version__  # noqa: F401
