"""Symbolic Weyl geometry and conformal-action bookkeeping with a numeric holonomy lab."""

__version__ = "0.1.0"
