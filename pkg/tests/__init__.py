"""Test suite for sb-curves."""
