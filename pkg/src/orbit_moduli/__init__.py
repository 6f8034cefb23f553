"""Constructive orbit witnesses, counterexamples and Schatten-norm checks."""

__version__ = "0.1.0"
