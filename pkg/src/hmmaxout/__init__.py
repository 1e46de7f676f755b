"""Hybrid HMM/Maxout scene text recognition."""
__version__ = "0.1.0"
