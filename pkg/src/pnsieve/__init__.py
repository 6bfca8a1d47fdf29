"""Finite-field computation engine: primitive/normal element freeness,
character-sum counting, and the sieve criteria that certify existence of
primitive normal pairs with a prescribed second trace coefficient."""

__version__ = "0.1.0"
