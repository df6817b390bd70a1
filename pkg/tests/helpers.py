"""Reference factorizations shared across the test suites."""

from fractions import Fraction

from psdrigid.factorization import PsdFactorization, from_vectors, reconstruct
from psdrigid.symcore import SymMat


def rigid_example() -> PsdFactorization:
    """Zero-free 3x3 instance whose factorization is rigid in every sense."""
    A = (SymMat.from_upper(2, (1, 0, 0)),
         SymMat.from_upper(2, (Fraction(1, 4), Fraction(-1, 4), Fraction(1, 4))),
         SymMat.from_upper(2, (0, 0, 1)))
    B = (SymMat.from_upper(2, (Fraction(1, 4), Fraction(3, 4), Fraction(9, 4))),
         SymMat.from_upper(2, (Fraction(1, 4), Fraction(-1, 4), Fraction(1, 4))),
         SymMat.from_upper(2, (1, Fraction(1, 4), Fraction(1, 16))))
    F = PsdFactorization(2, A, B)
    return F.with_M(reconstruct(F))


# the same factorization as rank-one vectors, for perturbation tests
RIGID_A_VECTORS = ((1.0, 0.0), (0.5, -0.5), (0.0, 1.0))
RIGID_B_VECTORS = ((0.5, 1.5), (0.5, -0.5), (1.0, 0.25))


def flexible_example() -> PsdFactorization:
    """Zero-free 3x3 instance with full-dimensional motion cone."""
    return from_vectors([(1, 2), (1, 3), (1, 4)], [(1, 5), (1, 6), (1, 7)])


def derangement_example() -> PsdFactorization:
    """Rank-one factorization of [[0,1,1],[1,0,1],[1,1,0]]."""
    return from_vectors([(1, 0), (0, 1), (1, -1)], [(0, 1), (1, 0), (1, 1)])
