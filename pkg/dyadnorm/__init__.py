"""dyadnorm: dyadic weak-type quasi-norms, oscillation functionals and their counterexamples."""

__version__ = "0.1.0"
