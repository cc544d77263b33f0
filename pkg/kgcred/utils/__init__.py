"""Utility functions for kgcred."""

from .validators import validate_split_ratios, validate_training_params, validate_cluster_params
from .errors import KGCredError

__all__ = ['validate_split_ratios', 'validate_training_params', 'validate_cluster_params', 'KGCredError']
