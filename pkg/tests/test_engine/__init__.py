"""Tests package for Gaussian moment engine."""
