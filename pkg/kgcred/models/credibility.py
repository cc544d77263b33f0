"""Credibility feature, policy and result models."""

from typing import Dict, List, Optional, Any
from dataclasses import dataclass, field

from ..utils.errors import KGCredError

# Per-domain features, then domain-independent ones.
DOMAIN_FEATURES = ('Sc', 'W', 'R', 'L', 'P', 'SP', 'SN', 'S')
GLOBAL_FEATURES = ('Twt_Sim', 'URL_Sim', 'FF_R')

# Equal weights: the default credibility is the plain mean of normalized features.
DEFAULT_WEIGHTS = {name: 1.0 for name in DOMAIN_FEATURES + GLOBAL_FEATURES}

REASON_SPAM = 'breadth_and_repetition'
REASON_NO_DOMAIN = 'no_domain_activity'


@dataclass
class CredibilityFeatures:
    """Raw credibility metric of one user record (one chunk when chunked)."""

    user_id: str
    handle: str
    chunk: Optional[str]
    n: int
    twt_sim: float
    url_sim: float
    sum_cnt_scr: Dict[str, float]
    sum_url_scr: Dict[str, float]
    sc: Dict[str, float]
    df: int
    idf: Optional[float]
    w: Dict[str, float]
    r: Dict[str, float]
    l: Dict[str, float]
    p: Dict[str, float]
    sp: Dict[str, float]
    sn: Dict[str, float]
    s: Dict[str, float]
    followers: int
    friends: int
    age_years: float
    ff_r: float
    flags: List[str] = field(default_factory=list)

    @property
    def excluded(self) -> bool:
        """DF = 0 leaves IDF undefined; such records are not ranked."""
        return self.df == 0

    @property
    def breadth(self) -> float:
        return self.df / self.n

    def domain_value(self, feature: str, domain: str) -> float:
        table = {
            'Sc': self.sc, 'W': self.w, 'R': self.r, 'L': self.l, 'P': self.p,
            'SP': self.sp, 'SN': self.sn, 'S': self.s,
        }[feature]
        return table.get(domain, 0.0)

    def global_value(self, feature: str) -> float:
        return {'Twt_Sim': self.twt_sim, 'URL_Sim': self.url_sim, 'FF_R': self.ff_r}[feature]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'user_id': self.user_id,
            'handle': self.handle,
            'chunk': self.chunk,
            'Twt_Sim': self.twt_sim,
            'URL_Sim': self.url_sim,
            'DF': self.df,
            'IDF': self.idf,
            'FOL': self.followers,
            'FRD': self.friends,
            'Age': self.age_years,
            'FF_R': self.ff_r,
            'Sc': dict(self.sc),
            'W': dict(self.w),
            'flags': list(self.flags)
        }


@dataclass
class CredibilityPolicy:
    """Feature weights and spam thresholds."""

    weights: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    breadth_threshold: float = 0.95
    repetition_threshold: float = 0.5

    def __post_init__(self):
        unknown = set(self.weights) - set(DOMAIN_FEATURES) - set(GLOBAL_FEATURES)
        if unknown:
            raise KGCredError(f"unknown credibility features: {', '.join(sorted(unknown))}")
        if any(weight < 0 for weight in self.weights.values()):
            raise KGCredError("credibility weights must be non-negative")
        if not sum(self.weights.values()) > 0:
            raise KGCredError("at least one credibility weight must be positive")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], defaults: Optional['CredibilityPolicy'] = None) -> 'CredibilityPolicy':
        base = defaults or cls()
        weights = dict(base.weights)
        weights.update({str(key): float(value) for key, value in (data.get('weights') or {}).items()})
        return cls(
            weights=weights,
            breadth_threshold=float(data.get('breadth_threshold', base.breadth_threshold)),
            repetition_threshold=float(data.get('repetition_threshold', base.repetition_threshold))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'weights': dict(self.weights),
            'breadth_threshold': self.breadth_threshold,
            'repetition_threshold': self.repetition_threshold
        }


@dataclass
class CredibilityRecord:
    """Ranked credibility of one user across domains."""

    user_id: str
    handle: str
    normalized: Dict[str, Dict[str, float]]
    credibility: Dict[str, float]
    spam_flag: bool = False
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'user_id': self.user_id,
            'handle': self.handle,
            'normalized': {domain: dict(values) for domain, values in self.normalized.items()},
            'credibility': dict(self.credibility),
            'spam_flag': self.spam_flag,
            'reason': self.reason
        }


@dataclass
class UserVerdict:
    """Spam-policy outcome for one user (chunk values averaged)."""

    user_id: str
    handle: str
    breadth: float
    twt_sim: float
    flagged: bool
    reason: Optional[str] = None


@dataclass
class CredibilityResult:
    """Everything the credibility pipeline produces."""

    features: List[CredibilityFeatures]
    records: List[CredibilityRecord]
    rankings: Dict[str, List[CredibilityRecord]]
    kept: List[UserVerdict]
    flagged: List[UserVerdict]

    def flagged_ids(self) -> List[str]:
        return [verdict.user_id for verdict in self.flagged]
