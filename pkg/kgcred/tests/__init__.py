"""Tests for kgcred."""
