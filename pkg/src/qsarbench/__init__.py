"""Structure-separated cross-validation benchmark harness for molecular property models."""

__version__ = "0.1.0"
