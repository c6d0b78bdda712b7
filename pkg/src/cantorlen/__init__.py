"""Gap combinatorics of generalized Cantor sets, with hyperbolic length
bounds that stay meaningful at doubly exponential scales."""

__version__ = "0.1.0"
