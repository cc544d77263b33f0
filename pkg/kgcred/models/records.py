"""Social user records, tabular input and mapping rules."""

import math
from typing import Dict, List, Optional, Any, Sequence
from dataclasses import dataclass, field

from ..utils.errors import RecordValidationError, MappingError


@dataclass(frozen=True)
class DomainScore:
    """Relevance of a text or web page to one knowledge domain."""

    domain: str
    score: float

    def to_dict(self) -> Dict[str, Any]:
        return {'domain': self.domain, 'score': self.score}


@dataclass(frozen=True)
class Reply:
    """A reply to a tweet with its sentiment in [-1, 1]."""

    text: str
    sentiment: float

    def to_dict(self) -> Dict[str, Any]:
        return {'text': self.text, 'sentiment': self.sentiment}


@dataclass
class Tweet:
    """A tweet with engagement counts and precomputed domain scores."""

    text: str
    urls: List[str] = field(default_factory=list)
    retweets: int = 0
    likes: int = 0
    replies: List[Reply] = field(default_factory=list)
    domain_scores: List[DomainScore] = field(default_factory=list)
    url_domain_scores: List[DomainScore] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'text': self.text,
            'urls': list(self.urls),
            'retweets': self.retweets,
            'likes': self.likes,
            'replies': [reply.to_dict() for reply in self.replies],
            'domain_scores': [score.to_dict() for score in self.domain_scores],
            'url_domain_scores': [score.to_dict() for score in self.url_domain_scores]
        }


@dataclass
class UserRecord:
    """Represents one social user (optionally one temporal chunk of them)."""

    user_id: str
    handle: str
    followers: int
    friends: int
    age_years: float
    tweets: List[Tweet] = field(default_factory=list)
    chunk: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert record to dictionary for JSON serialization."""
        data = {
            'user_id': self.user_id,
            'handle': self.handle,
            'followers': self.followers,
            'friends': self.friends,
            'age_years': self.age_years,
            'tweets': [tweet.to_dict() for tweet in self.tweets]
        }
        if self.chunk is not None:
            data['chunk'] = self.chunk
        return data


class UserRecordFormatter:
    """Handles validation and formatting of raw user-record objects."""

    @staticmethod
    def _is_number(value: Any) -> bool:
        """JSON numbers only: bools, NaN and Infinity are rejected."""
        if isinstance(value, bool):
            return False
        return isinstance(value, int) or (isinstance(value, float) and math.isfinite(value))

    @staticmethod
    def _count(raw: Dict[str, Any], key: str, path: str) -> int:
        value = raw.get(key, 0)
        if not UserRecordFormatter._is_number(value) or value != int(value):
            raise RecordValidationError(f"expected a non-negative integer, got {value!r}", f"{path}{key}")
        if value < 0:
            raise RecordValidationError(f"must be non-negative, got {value}", f"{path}{key}")
        return int(value)

    @staticmethod
    def _number(raw: Dict[str, Any], key: str, path: str, low: float, high: float) -> float:
        value = raw.get(key)
        if not UserRecordFormatter._is_number(value):
            raise RecordValidationError(f"expected a finite number, got {value!r}", f"{path}{key}")
        if not low <= value <= high:
            raise RecordValidationError(f"{value} outside [{low}, {high}]", f"{path}{key}")
        return float(value)

    @staticmethod
    def _scores(raw: Any, path: str, domains: Optional[Sequence[str]]) -> List[DomainScore]:
        if raw is None:
            return []
        if not isinstance(raw, list):
            raise RecordValidationError("expected a list", path)
        scores = []
        for index, item in enumerate(raw):
            item_path = f"{path}[{index}]."
            if not isinstance(item, dict):
                raise RecordValidationError("expected an object", f"{path}[{index}]")
            domain = item.get('domain')
            if not isinstance(domain, str) or not domain:
                raise RecordValidationError("missing domain label", f"{item_path}domain")
            if domains is not None and domain not in domains:
                raise RecordValidationError(f"unknown domain {domain!r}", f"{item_path}domain")
            score = UserRecordFormatter._number(item, 'score', item_path, 0.0, 1.0)
            scores.append(DomainScore(domain, score))
        return scores

    @staticmethod
    def format_record(raw: Dict[str, Any], domains: Optional[Sequence[str]] = None) -> UserRecord:
        """
        Convert a raw user object to a UserRecord.

        Args:
            raw: Decoded record object
            domains: Canonical domain labels; None accepts any label

        Returns:
            Validated UserRecord

        Raises:
            RecordValidationError: with the offending field path
        """
        if not isinstance(raw, dict):
            raise RecordValidationError("expected an object", "<record>")

        user_id = raw.get('user_id')
        if user_id is None or str(user_id) == '':
            raise RecordValidationError("missing user id", "user_id")
        handle = raw.get('handle') or str(user_id)

        followers = UserRecordFormatter._count(raw, 'followers', '')
        friends = UserRecordFormatter._count(raw, 'friends', '')
        age = raw.get('age_years')
        if not UserRecordFormatter._is_number(age) or not age > 0:
            raise RecordValidationError(f"account age must be > 0, got {age!r}", "age_years")

        raw_tweets = raw.get('tweets') or []
        if not isinstance(raw_tweets, list):
            raise RecordValidationError("expected a list", "tweets")

        tweets = []
        for t_index, raw_tweet in enumerate(raw_tweets):
            path = f"tweets[{t_index}]."
            if not isinstance(raw_tweet, dict):
                raise RecordValidationError("expected an object", f"tweets[{t_index}]")
            urls = raw_tweet.get('urls') or []
            if not isinstance(urls, list) or not all(isinstance(url, str) for url in urls):
                raise RecordValidationError("expected a list of strings", f"{path}urls")

            replies = []
            raw_replies = raw_tweet.get('replies') or []
            if not isinstance(raw_replies, list):
                raise RecordValidationError("expected a list", f"{path}replies")
            for r_index, raw_reply in enumerate(raw_replies):
                reply_path = f"{path}replies[{r_index}]."
                if not isinstance(raw_reply, dict):
                    raise RecordValidationError("expected an object", f"{path}replies[{r_index}]")
                sentiment = UserRecordFormatter._number(raw_reply, 'sentiment', reply_path, -1.0, 1.0)
                replies.append(Reply(str(raw_reply.get('text', '')), sentiment))

            tweets.append(Tweet(
                text=str(raw_tweet.get('text', '')),
                urls=list(urls),
                retweets=UserRecordFormatter._count(raw_tweet, 'retweets', path),
                likes=UserRecordFormatter._count(raw_tweet, 'likes', path),
                replies=replies,
                domain_scores=UserRecordFormatter._scores(raw_tweet.get('domain_scores'), f"{path}domain_scores", domains),
                url_domain_scores=UserRecordFormatter._scores(raw_tweet.get('url_domain_scores'), f"{path}url_domain_scores", domains)
            ))

        chunk = raw.get('chunk')
        return UserRecord(
            user_id=str(user_id),
            handle=str(handle),
            followers=followers,
            friends=friends,
            age_years=float(age),
            tweets=tweets,
            chunk=None if chunk is None else str(chunk)
        )


@dataclass(frozen=True)
class MappingRule:
    """
    One column mapping: subject from a column (with a URI-style prefix), a fixed
    predicate, and an object taken from a column or a constant.
    """

    subject_column: str
    predicate: str
    object_column: Optional[str] = None
    object_constant: Optional[str] = None
    subject_prefix: str = ''
    object_prefix: str = ''

    def __post_init__(self):
        if not self.subject_column or not self.predicate:
            raise MappingError("a rule needs a subject column and a predicate")
        if (self.object_column is None) == (self.object_constant is None):
            raise MappingError(f"rule {self.predicate!r} needs exactly one of object column or constant object")

    def columns(self) -> List[str]:
        referenced = [self.subject_column]
        if self.object_column is not None:
            referenced.append(self.object_column)
        return referenced

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MappingRule':
        if not isinstance(data, dict):
            raise MappingError("each rule must be an object")
        return cls(
            subject_column=str(data.get('subject_column', '')),
            predicate=str(data.get('predicate', '')),
            object_column=data.get('object_column'),
            object_constant=data.get('object_constant'),
            subject_prefix=str(data.get('subject_prefix', '')),
            object_prefix=str(data.get('object_prefix', ''))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subject_column': self.subject_column,
            'subject_prefix': self.subject_prefix,
            'predicate': self.predicate,
            'object_column': self.object_column,
            'object_constant': self.object_constant,
            'object_prefix': self.object_prefix
        }


@dataclass
class Table:
    """Rectangular rows with a header."""

    header: List[str]
    rows: List[List[str]]
