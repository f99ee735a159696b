"""Contact Riemannian geometry toolkit.

Builds the Tanaka-Webster-Tanno connection on user-defined charts,
constructs parabolic normal coordinates and special frames, and
verifies the constants and expansion coefficients of the Yamabe
functional asymptotics on the Heisenberg group by independent
quadrature and exact rational assembly.
"""

__version__ = "0.1.0"
