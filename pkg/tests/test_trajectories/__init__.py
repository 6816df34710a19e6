"""Tests package for trajectory integration."""
