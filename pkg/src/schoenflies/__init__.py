"""Bi-Lipschitz extension of planar circle embeddings via conformal maps."""
from .curves import CircleEmbedding, CurveError, bowtie, circle, ellipse, make_embedding, polygon, trig_perturbation
from .extend import GridSpec, PlaneExtension, extend_disk, extend_exterior, extend_plane_symmetric, extension_report
from .symmetrize import desymmetrize_extension, extend_plane_general, symmetrize, symmetrize_recentred

__version__ = "0.1.0"
