"""Dependent Bayesian lenses over finite stochastic and Gaussian Markov categories."""

__version__ = "0.1.0"
