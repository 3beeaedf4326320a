"""dirhub: a self-hostable shared directory tree.

All content lives in one hierarchical tree rooted at "ALL". Anyone can
create and govern directories; access is decided per directory by a
5-role x 4-right boolean matrix. Directories double as joinable groups,
search runs conjunctively over navigator-bar paths and article metadata,
and user machines can mount local folder listings into directories through
an outbound-only relay agent.
"""

from .hub import Hub

__all__ = ["Hub"]
__version__ = "0.1.0"
