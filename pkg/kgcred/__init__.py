"""
kgcred - Knowledge-graph embeddings with credibility-filtered social facts.

This package provides tools for:
- Building dictionary-encoded knowledge graphs from triples, tables and user records
- Scoring user credibility per knowledge domain and filtering spammers
- Training and evaluating TransE, DistMult, ComplEx, HolE and ConvKB embeddings
- Clustering, projecting and exporting learned entity embeddings
"""

__version__ = "1.0.0"
__author__ = "kgcred Team"
