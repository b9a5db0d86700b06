"""Linked partition ideals: tails, linking sets, q-difference systems and their recurrences."""

__version__ = "0.1.0"
