"""Tests package for analytic expressions."""
