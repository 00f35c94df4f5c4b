"""Keystream generation, stringology features and neural distinguishers for ARX stream ciphers."""

__version__ = "0.1.0"
