"""Figure generation for the scheduling simulator's CSV outputs."""

from .figures import SchemaError, render

__all__ = ["SchemaError", "render"]
__version__ = "0.1.0"
