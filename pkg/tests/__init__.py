"""Test suite for hybridlink."""
