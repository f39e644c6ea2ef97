"""Unit test package for fusetrack."""
