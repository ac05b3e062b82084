"""Exact strata-algebra computations on moduli of stable curves.

Subpackages:

- ``graphs``     stable graphs, canonical labels, automorphisms, degenerations
- ``integrals``  exact psi/kappa intersection numbers (Witten correlators)
- ``strata``     decorated strata, products, pushforwards, pairing ranks
- ``omega``      cusp-form (S12) decorated classes and the degree 13/15 ranks
- ``reps``       symmetric group representation arithmetic
- ``induction``  filling criteria, base-case regions, motive bookkeeping
"""

__version__ = "1.0.0"
