"""Tests for the distnet package."""
