try:
    from ._gtfdi import *  # noqa: F401,F403
    from ._gtfdi import __version__  # noqa: F401
except ImportError:  # extension built outside the package (development tree)
    from _gtfdi import *  # noqa: F401,F403
    from _gtfdi import __version__  # noqa: F401
