"""Lens, inversion, filtering and law services."""
