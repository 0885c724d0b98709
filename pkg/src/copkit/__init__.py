"""copkit: copositivity certification and stable-set bounds.

The package decides membership of symmetric matrices in the classical
sum-of-squares inner approximations of the copositive cone, produces
re-verifiable certificates, and computes the associated upper bounds on
the stability number of a graph.

Layout:
    poly         exact sparse multivariate polynomials over Fraction
    symmat       dense symmetric matrices, exact and float PSD tests
    sdp          dense multi-block primal-dual interior-point SDP solver
    certificates certificate types, verification, rational rounding
    cones        membership tests for the approximation cones
    simplexopt   exact copositivity oracle over the standard simplex
    graphs       stability number, critical edges, graph matrices
    bounds       zeta/theta bound hierarchies and the Lovasz theta oracle
    catalog      named matrices and polynomial identities
    cli          command-line front end
"""

__version__ = "0.1.0"
