"""Tests package for core parameter model."""
