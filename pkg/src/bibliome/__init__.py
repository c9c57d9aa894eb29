"""Text mining of protein-interaction literature.

Abstract classification with the variable trigonometric threshold (VTT)
linear classifier, latent-semantic (SVD) vote classification with
uncertainty-based integration, and full-text passage ranking with
word-proximity networks.
"""

__version__ = "0.1.0"
