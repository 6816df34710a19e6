"""Tests package for nonlocality measures."""
