"""Command-line test module."""
