"""narrowlie: exact-arithmetic toolkit for narrow positively graded Lie algebras.

Constructs and verifies the catalog of width-3/2 Carnot algebras, computes
graded second cohomology, builds central extensions, decides graded
isomorphism with certificates, and classifies by iterated central
extensions.
"""

__version__ = "0.1.0"

from .algebra import Element, GradedLieAlgebra
from .catalog import catalog
from .linalg import Matrix, Subspace, kernel_basis, rref, solve

__all__ = [
    "Element",
    "GradedLieAlgebra",
    "Matrix",
    "Subspace",
    "catalog",
    "kernel_basis",
    "rref",
    "solve",
    "__version__",
]
