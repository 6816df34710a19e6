"""Tests for velocity-field providers."""
