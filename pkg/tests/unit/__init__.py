"""Unit tests for nlsground."""
