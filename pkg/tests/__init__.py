"""Test package for tistar."""
