"""Tests package for bohmflow."""
