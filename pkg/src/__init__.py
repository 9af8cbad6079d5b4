"""Akhiezer polynomial lab."""
