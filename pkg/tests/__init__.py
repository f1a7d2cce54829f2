"""Tests for hyphull."""
