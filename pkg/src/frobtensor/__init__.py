"""Exact tensor products of formal Frobenius manifolds.

The package is organised bottom-up:

``series``       graded-symmetric correlator tensors over Q, potentials, formal shifts
``trees``        stable labelled trees and the forgetful maps on them
``m0n``          intersection theory on the moduli spaces M_{0,n}, the diagonal class
``frobenius``    Frobenius models and the single-manifold checks
``tensor``       tensor products of models, identities, Euler fields, base-point shifts
``rank_one``     the U(eta) calculus for one-dimensional theories
``semisimple``   canonical coordinates and special initial conditions
``cli``          the ``frobtensor`` command line tool
"""

__version__ = "0.1.0"
