"""Parabolic linear Weingarten surfaces in the upper half-space model of H^3."""
__version__ = "0.1.0"
