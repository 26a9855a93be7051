"""Exact arithmetic for Drinfeld modules over the coordinate ring of a
degree-two-truncated projective line: rank-one and rank-two module families,
period-lattice series, torsion kernels over finite fields, and Weil pairings
built from residue duality.
"""

__version__ = "0.1.0"
