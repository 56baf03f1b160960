"""Realtime breaking-news detection from Wikipedia recent-changes streams."""

__version__ = "0.1.0"
