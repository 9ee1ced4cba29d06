"""Analysis core test module."""
