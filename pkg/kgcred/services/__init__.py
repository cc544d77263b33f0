"""Services for kgcred."""

from .graph_service import KnowledgeGraph, build_graph
from .credibility_service import CredibilityService
from .training_service import train, random_search
from .evaluation_service import evaluate_ranking, calibrate, classify

__all__ = ['KnowledgeGraph', 'build_graph', 'CredibilityService', 'train', 'random_search',
           'evaluate_ranking', 'calibrate', 'classify']
