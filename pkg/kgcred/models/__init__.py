"""Data models for kgcred."""

from .graph import Triple, Dictionary, GraphMetadata
from .records import UserRecord, UserRecordFormatter, MappingRule, Table
from .credibility import CredibilityFeatures, CredibilityPolicy, CredibilityRecord, CredibilityResult
from .parameters import ModelParameters, Gradient, init_params
from .training import TrainingConfig, SearchSpace, TrialResult, TrainingResult
from .reports import RankingReport, ConfusionMatrix, ClassificationReport, Calibration, ClusterAssignment, Projection
from .pipeline import PipelineConfig

__all__ = [
    'Triple', 'Dictionary', 'GraphMetadata',
    'UserRecord', 'UserRecordFormatter', 'MappingRule', 'Table',
    'CredibilityFeatures', 'CredibilityPolicy', 'CredibilityRecord', 'CredibilityResult',
    'ModelParameters', 'Gradient', 'init_params',
    'TrainingConfig', 'SearchSpace', 'TrialResult', 'TrainingResult',
    'RankingReport', 'ConfusionMatrix', 'ClassificationReport', 'Calibration', 'ClusterAssignment', 'Projection',
    'PipelineConfig'
]
