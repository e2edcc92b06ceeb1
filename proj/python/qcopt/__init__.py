from ._qcopt import *  # noqa: F401,F403
from ._qcopt import __version__  # noqa: F401
