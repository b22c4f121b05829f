"""Markov-category instances."""
