"""Grid-frequency deviation estimation: three-hypothesis detector + Viterbi."""

from ._gridhmm import *  # noqa: F401,F403
from ._gridhmm import __version__  # noqa: F401
