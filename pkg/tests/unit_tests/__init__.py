"""Unit tests for trading agents."""

