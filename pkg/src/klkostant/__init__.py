"""Exact combinatorics for S_n and its Hecke algebra, aimed at Kostant's problem."""

__version__ = "0.1.0"
