"""Exact LRU cache access classification."""
