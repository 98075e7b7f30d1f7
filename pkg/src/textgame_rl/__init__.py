"""textgame_rl: Q-learning agents for synthetic text-adventure games.

Implements the DRRN text-pair Q-network with three representation probes
(location-only observations, fixed hash encodings, and an inverse-dynamics
regularizer with intrinsic exploration reward) on a deterministic
interactive-fiction engine.
"""

__version__ = "0.1.0"

from .backend import backend_name

__all__ = ["backend_name", "__version__"]
