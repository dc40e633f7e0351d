"""sit-squeeze: positive-P simulation of squeezed SIT solitons in mercury vapor."""

__version__ = "0.1.0"
__all__ = ["__version__"]
