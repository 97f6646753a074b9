"""Tests for the HAEO integration."""
