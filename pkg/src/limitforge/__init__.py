"""limitforge: a workbench for finitely presented groups."""

__version__ = "0.1.0"
