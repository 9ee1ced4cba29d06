"""Test suite for Waterway Accidents."""
