"""chengsym: symbolic-numeric symmetry analysis of the Cheng equation.

The package verifies Lie point symmetries of the coupled light-absorption
system u_x = -a*u*v, v_t = b*u_x, executes its similarity reductions down to
Riccati / Euler / Abel equations, constructs closed-form solutions, and
cross-checks everything against independent numerical integration and grid
residuals.
"""

__version__ = "0.1.0"
