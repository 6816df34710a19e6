"""Integration tests for full workflows and the acceptance suite."""
