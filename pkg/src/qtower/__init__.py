"""Executable semantics for the tower Unitary -> Contraction -> CPTN -> split C*-algebras."""

from ._kernels import BACKEND

__version__ = "0.1.0"
