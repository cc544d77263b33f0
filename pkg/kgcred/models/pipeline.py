"""Pipeline configuration shared by the command-line surface."""

import json
from typing import Dict, Any, Optional, Tuple
from dataclasses import dataclass, field

from ..utils.errors import KGCredError
from ..utils.validators import validate_split_ratios
from .credibility import CredibilityPolicy


@dataclass
class PipelineConfig:
    """
    Settings of a pipeline run, read from a JSON file and overridden by flags.

    Training values stay raw here; commands validate them through
    TrainingConfig.from_dict once flags are merged in.
    """

    seed: int = 0
    output_dir: str = 'out'
    threads: int = 1
    domains_file: Optional[str] = None
    search_space_file: Optional[str] = None
    split_ratios: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    filtered: bool = True
    training: Dict[str, Any] = field(default_factory=dict)
    credibility: CredibilityPolicy = field(default_factory=CredibilityPolicy)
    paths: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_app_config(cls, app_config) -> 'PipelineConfig':
        """Defaults from the environment-driven Config class."""
        return cls(
            seed=app_config.SEED,
            output_dir=app_config.OUTPUT_DIR,
            threads=app_config.THREADS,
            domains_file=app_config.DOMAINS_FILE,
            search_space_file=app_config.SEARCH_SPACE_FILE,
            split_ratios=tuple(app_config.SPLIT_RATIOS),
            training={
                'k': app_config.DEFAULT_K,
                'epochs': app_config.DEFAULT_EPOCHS,
                'batches_count': app_config.DEFAULT_BATCHES
            },
            credibility=CredibilityPolicy(
                breadth_threshold=app_config.BREADTH_THRESHOLD,
                repetition_threshold=app_config.REPETITION_THRESHOLD
            )
        )

    def merge_file(self, path: str) -> 'PipelineConfig':
        """Overlay values from a JSON pipeline file."""
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        except json.JSONDecodeError as e:
            raise KGCredError(f"{path}: invalid JSON ({e.msg})")
        if not isinstance(data, dict):
            raise KGCredError(f"{path}: pipeline config must be an object")

        unknown = set(data) - {'seed', 'output_dir', 'threads', 'domains_file', 'search_space_file', 'split_ratios', 'filtered',
                               'training', 'credibility', 'paths'}
        if unknown:
            raise KGCredError(f"{path}: unknown keys: {', '.join(sorted(unknown))}")

        if 'seed' in data:
            self.seed = int(data['seed'])
        if 'output_dir' in data:
            self.output_dir = str(data['output_dir'])
        if 'threads' in data:
            self.threads = int(data['threads'])
        if 'domains_file' in data:
            self.domains_file = str(data['domains_file'])
        if 'search_space_file' in data:
            self.search_space_file = str(data['search_space_file'])
        if 'split_ratios' in data:
            is_valid, error_msg, ratios = validate_split_ratios(data['split_ratios'])
            if not is_valid:
                raise KGCredError(f"{path}: {error_msg}")
            self.split_ratios = ratios
        if 'filtered' in data:
            self.filtered = bool(data['filtered'])
        self.training.update(data.get('training') or {})
        if 'credibility' in data:
            self.credibility = CredibilityPolicy.from_dict(data['credibility'], self.credibility)
        self.paths.update({str(key): str(value) for key, value in (data.get('paths') or {}).items()})
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            'seed': self.seed,
            'output_dir': self.output_dir,
            'threads': self.threads,
            'domains_file': self.domains_file,
            'search_space_file': self.search_space_file,
            'split_ratios': list(self.split_ratios),
            'filtered': self.filtered,
            'training': dict(self.training),
            'credibility': self.credibility.to_dict(),
            'paths': dict(self.paths)
        }
