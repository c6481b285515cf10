"""Integration tests for nlsground."""
