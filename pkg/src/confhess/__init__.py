"""Numerical tools for Moebius-invariant eigenvalue equations of conformal Hessians.

Modules
-------
cone        symmetric cones, their mu invariants and negation duals
symfun      symmetric functions of eigenvalues and gauge / convex-extension constructions
conformal   scalar fields, the Moebius Hessian A[v] and Moebius maps
radial      closed-form radial solutions and the radial Dirichlet problem
counterex   singular profiles, the one-variable ODE, gradient blow-up sequences
ricci       the Schouten/Ricci eigenvalue dictionary
numerics    finite differences, Jacobi eigensolver, root finding, Runge-Kutta
cli         command-line front end
"""

__version__ = "0.1.0"
