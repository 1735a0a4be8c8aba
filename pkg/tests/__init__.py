"""Test package for qrnlab."""
