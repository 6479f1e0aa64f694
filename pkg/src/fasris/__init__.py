"""Outage-probability analysis for RIS-assisted fluid-antenna links.

Analytic outage under a block-diagonal correlation approximation with
upper/lower bounds and high-SNR asymptote, a statistical-CSI phase
optimizer, and a Monte-Carlo simulator over correlated Rician channels
that serves as the ground-truth oracle.
"""

__version__ = "0.1.0"
