"""Dual-mode q-calculus toolkit for the q-Fock spaces H_{2,q} and F_{2,q}."""

from .qscalar import Q, QPoly, QRat, qpoly_arith, qrat_eval

__version__ = "0.1.0"
