"""Squeeze-Tools tests."""
