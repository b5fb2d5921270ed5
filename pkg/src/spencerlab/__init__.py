"""Exact-arithmetic engine for constraint-coupled Spencer operators over
semisimple Lie algebras, with a discrete complex realization and a
desk-scale variational solver."""

__version__ = "0.1.0"
