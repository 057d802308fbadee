"""Temporal forum interaction networks: orbit census, NetEmd comparison,
change detection and sentiment analytics."""

__version__ = "0.1.0"
