"""Global dimension of rational incomplete Mackey functor categories for
finite abelian groups with disk-like transfer systems, computed through the
incidence algebras of subgroup posets, with an independent brute-force
resolution oracle."""

__version__ = "0.1.0"

from . import groups, izext, mackey, oracle, posets, qlinalg, transfer  # noqa: F401
