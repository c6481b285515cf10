"""Tests for nlsground."""
