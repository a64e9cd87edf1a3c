"""tropcover: exact Hurwitz numbers and tropical admissible covers."""

__version__ = "0.1.0"
