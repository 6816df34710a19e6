"""Tests package for command-line front end."""
