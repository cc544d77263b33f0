"""Domain-based user credibility scoring and spam filtering."""

import logging
import math
import unicodedata
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
from urllib.parse import urlsplit

import numpy as np

from ..models.credibility import (
    CredibilityFeatures, CredibilityPolicy, CredibilityRecord, CredibilityResult, UserVerdict,
    DOMAIN_FEATURES, GLOBAL_FEATURES, REASON_SPAM, REASON_NO_DOMAIN
)
from ..models.records import UserRecord
from ..services.ingest_service import DomainScoreProvider, RecordDomainScoreProvider
from ..utils.errors import KGCredError
from ..utils.formatting import format_row

logger = logging.getLogger(__name__)

FLAG_EMPTY_CONTENT = 'empty_content'
FLAG_NO_URLS = 'no_urls'

LabelTriple = Tuple[str, str, str]


def _is_punctuation(char: str) -> bool:
    return unicodedata.category(char).startswith('P')


def tokenize(text: str) -> List[str]:
    """Whitespace split, lowercase, punctuation stripped at token edges."""
    tokens = []
    for raw in text.split():
        token = raw.lower()
        start, end = 0, len(token)
        while start < end and _is_punctuation(token[start]):
            start += 1
        while end > start and _is_punctuation(token[end - 1]):
            end -= 1
        if start < end:
            tokens.append(token[start:end])
    return tokens


def url_host(url: str) -> str:
    host = urlsplit(url.strip()).hostname
    return host if host else url.strip().lower()


def ff_ratio(followers: int, friends: int, age_years: float) -> float:
    """Followers-friends ratio per account year; 1/Age when the counts are equal."""
    if not age_years > 0:
        raise KGCredError(f"account age must be > 0, got {age_years}")
    if followers != friends:
        return (followers - friends) / age_years
    return 1.0 / age_years


def max_normalize(values: np.ndarray) -> np.ndarray:
    """Divide each column (axis 0 = users) by its maximum; all-zero columns stay zero."""
    values = np.asarray(values, dtype=np.float64)
    maxima = values.max(axis=0) if values.shape[0] else np.zeros(values.shape[1:])
    positive = maxima > 0
    safe = np.where(positive, maxima, 1.0)
    return np.where(positive, values / safe, 0.0)


def min_max_normalize(values: np.ndarray) -> np.ndarray:
    """Map a column into [0, 1]; a constant column maps to 1 when positive, else 0."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return values
    low, high = values.min(), values.max()
    if high > low:
        return (values - low) / (high - low)
    return np.where(values > 0, 1.0, 0.0)


@dataclass(frozen=True)
class Engagement:
    """Retweets, likes, replies and reply sentiment within one domain."""

    r: float
    l: float
    p: float
    sp: float
    sn: float
    s: float


@dataclass
class NormalizedTable:
    """Normalized features: domain array (records x domains x features) and globals."""

    domain_values: np.ndarray
    global_values: np.ndarray


class CredibilityService:
    """Computes the credibility metric, normalizes it, ranks users and flags spammers."""

    def __init__(self, domains: Sequence[str], policy: Optional[CredibilityPolicy] = None,
                 provider: Optional[DomainScoreProvider] = None):
        """
        Initialize credibility service.

        Args:
            domains: Canonical domain labels (n = len(domains))
            policy: Weights and spam thresholds
            provider: Source of tweet/URL domain scores
        """
        if not domains:
            raise KGCredError("at least one domain is required")
        self.domains = list(domains)
        self.policy = policy or CredibilityPolicy()
        self.provider = provider or RecordDomainScoreProvider()

    def tweet_similarity(self, record: UserRecord) -> Tuple[float, bool]:
        """
        Distinct-word ratio over all the user's tweets.

        Returns:
            Tuple of (Twt_Sim, empty_content); no words gives (1.0, True)
        """
        tokens = [token for tweet in record.tweets for token in tokenize(tweet.text)]
        if not tokens:
            return 1.0, True
        return len(set(tokens)) / len(tokens), False

    def url_similarity(self, record: UserRecord) -> Tuple[float, bool]:
        """
        Half the ratio of (distinct URLs + distinct hosts) to all URLs.

        Returns:
            Tuple of (URL_Sim, no_urls); no URLs gives (1.0, True)
        """
        urls = [url.strip() for tweet in record.tweets for url in tweet.urls if url.strip()]
        if not urls:
            return 1.0, True
        distinct_urls = len(set(urls))
        distinct_hosts = len({url_host(url) for url in urls})
        return 0.5 * ((distinct_urls + distinct_hosts) / len(urls)), False

    def domain_sums(self, record: UserRecord) -> Tuple[Dict[str, float], Dict[str, float]]:
        """Per-domain sums of tweet-text scores and of linked-page scores."""
        sum_cnt = {domain: 0.0 for domain in self.domains}
        sum_url = {domain: 0.0 for domain in self.domains}
        for tweet in record.tweets:
            for score in self.provider.tweet_scores(tweet):
                if score.domain in sum_cnt:
                    sum_cnt[score.domain] += score.score
            for score in self.provider.url_scores(tweet):
                if score.domain in sum_url:
                    sum_url[score.domain] += score.score
        return sum_cnt, sum_url

    @staticmethod
    def combine_scores(twt_sim: float, sum_cnt_scr: float, url_sim: float, sum_url_scr: float) -> float:
        return twt_sim * sum_cnt_scr + url_sim * sum_url_scr

    def combined_domain_score(self, record: UserRecord, domain: str) -> float:
        """Sc[d] = Twt_Sim * Sum_cnt_scr[d] + URL_Sim * Sum_url_scr[d]."""
        twt_sim, _ = self.tweet_similarity(record)
        url_sim, _ = self.url_similarity(record)
        sum_cnt, sum_url = self.domain_sums(record)
        return self.combine_scores(twt_sim, sum_cnt.get(domain, 0.0), url_sim, sum_url.get(domain, 0.0))

    def _combined_scores(self, record: UserRecord) -> Dict[str, float]:
        twt_sim, _ = self.tweet_similarity(record)
        url_sim, _ = self.url_similarity(record)
        sum_cnt, sum_url = self.domain_sums(record)
        return {domain: self.combine_scores(twt_sim, sum_cnt[domain], url_sim, sum_url[domain])
                for domain in self.domains}

    def idf_from_scores(self, sc: Dict[str, float]) -> Tuple[int, Optional[float], Dict[str, float]]:
        """DF, IDF = log10(n / DF) and W[d] = Sc[d] * IDF; IDF is None when DF = 0."""
        df = sum(1 for domain in self.domains if sc.get(domain, 0.0) > 0)
        if df == 0:
            return 0, None, {domain: 0.0 for domain in self.domains}
        idf = math.log10(len(self.domains) / df)
        return df, idf, {domain: sc.get(domain, 0.0) * idf for domain in self.domains}

    def idf_and_weight(self, record: UserRecord) -> Tuple[Optional[float], Dict[str, float]]:
        _, idf, weights = self.idf_from_scores(self._combined_scores(record))
        return idf, weights

    def engagement(self, record: UserRecord, domain: str) -> Engagement:
        """
        Engagement over the tweets assigned to a domain.

        A tweet belongs to every domain it (or a page it links) scores above 0 for.
        """
        r = l = p = sp = sn = 0.0
        for tweet in record.tweets:
            scored = any(score.domain == domain and score.score > 0 for score in self.provider.tweet_scores(tweet))
            scored = scored or any(score.domain == domain and score.score > 0 for score in self.provider.url_scores(tweet))
            if not scored:
                continue
            r += tweet.retweets
            l += tweet.likes
            p += len(tweet.replies)
            for reply in tweet.replies:
                if reply.sentiment > 0:
                    sp += reply.sentiment
                elif reply.sentiment < 0:
                    sn += reply.sentiment
        return Engagement(r=r, l=l, p=p, sp=sp, sn=sn, s=sp - sn)

    @staticmethod
    def ff_ratio(record: UserRecord) -> float:
        return ff_ratio(record.followers, record.friends, record.age_years)

    def compute_features(self, record: UserRecord) -> CredibilityFeatures:
        """Compute every raw feature of one record."""
        flags = []
        twt_sim, empty = self.tweet_similarity(record)
        if empty:
            flags.append(FLAG_EMPTY_CONTENT)
        url_sim, no_urls = self.url_similarity(record)
        if no_urls:
            flags.append(FLAG_NO_URLS)
        sum_cnt, sum_url = self.domain_sums(record)
        sc = {domain: self.combine_scores(twt_sim, sum_cnt[domain], url_sim, sum_url[domain]) for domain in self.domains}
        df, idf, weights = self.idf_from_scores(sc)
        if df == 0:
            flags.append(REASON_NO_DOMAIN)

        engagement = {domain: self.engagement(record, domain) for domain in self.domains}
        return CredibilityFeatures(
            user_id=record.user_id,
            handle=record.handle,
            chunk=record.chunk,
            n=len(self.domains),
            twt_sim=twt_sim,
            url_sim=url_sim,
            sum_cnt_scr=sum_cnt,
            sum_url_scr=sum_url,
            sc=sc,
            df=df,
            idf=idf,
            w=weights,
            r={domain: value.r for domain, value in engagement.items()},
            l={domain: value.l for domain, value in engagement.items()},
            p={domain: value.p for domain, value in engagement.items()},
            sp={domain: value.sp for domain, value in engagement.items()},
            sn={domain: value.sn for domain, value in engagement.items()},
            s={domain: value.s for domain, value in engagement.items()},
            followers=record.followers,
            friends=record.friends,
            age_years=record.age_years,
            ff_r=self.ff_ratio(record),
            flags=flags
        )

    def raw_table(self, features: Sequence[CredibilityFeatures]) -> Tuple[np.ndarray, np.ndarray]:
        """Raw values as arrays: (records x domains x domain features), (records x global features)."""
        domain_values = np.zeros((len(features), len(self.domains), len(DOMAIN_FEATURES)))
        global_values = np.zeros((len(features), len(GLOBAL_FEATURES)))
        for row, item in enumerate(features):
            for d_index, domain in enumerate(self.domains):
                for f_index, name in enumerate(DOMAIN_FEATURES):
                    value = item.domain_value(name, domain)
                    # SN is <= 0; its magnitude is what gets normalized
                    domain_values[row, d_index, f_index] = abs(value) if name == 'SN' else value
            for f_index, name in enumerate(GLOBAL_FEATURES):
                global_values[row, f_index] = item.global_value(name)
        return domain_values, global_values

    @staticmethod
    def normalize_arrays(domain_values: np.ndarray, global_values: np.ndarray) -> NormalizedTable:
        """Max-normalize per domain and feature; FF_R is min-max normalized."""
        normalized_domain = max_normalize(domain_values) if len(domain_values) else domain_values.copy()
        normalized_global = np.array(global_values, dtype=np.float64, copy=True)
        if len(global_values):
            ff_column = GLOBAL_FEATURES.index('FF_R')
            for column in range(global_values.shape[1]):
                if column == ff_column:
                    normalized_global[:, column] = min_max_normalize(global_values[:, column])
                else:
                    normalized_global[:, column] = max_normalize(global_values[:, column:column + 1])[:, 0]
        return NormalizedTable(domain_values=normalized_domain, global_values=normalized_global)

    def normalize_per_domain(self, features: Sequence[CredibilityFeatures]) -> NormalizedTable:
        """Normalize every feature against the maximum over users in its domain."""
        if not features:
            raise KGCredError("normalization needs at least one record")
        return self.normalize_arrays(*self.raw_table(features))

    def credibility_values(self, table: NormalizedTable) -> np.ndarray:
        """Weighted mean of normalized features: (records x domains), values in [0, 1]."""
        domain_weights = np.array([self.policy.weights.get(name, 0.0) for name in DOMAIN_FEATURES])
        global_weights = np.array([self.policy.weights.get(name, 0.0) for name in GLOBAL_FEATURES])
        total = domain_weights.sum() + global_weights.sum()
        domain_part = (table.domain_values * domain_weights).sum(axis=2)
        global_part = (table.global_values * global_weights).sum(axis=1)
        return (domain_part + global_part[:, None]) / total

    def credibility_rank(self, features: Sequence[CredibilityFeatures],
                         verdicts: Optional[Dict[str, UserVerdict]] = None
                         ) -> Tuple[List[CredibilityRecord], Dict[str, List[CredibilityRecord]]]:
        """
        Credibility per user and domain, ranked per domain.

        Chunks of one user are averaged arithmetically. Records with DF = 0 are
        left out of normalization and ranking and reported with a reason.

        Returns:
            Tuple of (records in first-seen user order, rankings by domain)
        """
        ranked_features = [item for item in features if not item.excluded]
        user_order: List[str] = []
        handles: Dict[str, str] = {}
        for item in features:
            if item.user_id not in handles:
                user_order.append(item.user_id)
                handles[item.user_id] = item.handle

        sums: Dict[str, np.ndarray] = {}
        normalized_sums: Dict[str, np.ndarray] = {}
        counts: Dict[str, int] = {}
        if ranked_features:
            table = self.normalize_per_domain(ranked_features)
            values = self.credibility_values(table)
            for row, item in enumerate(ranked_features):
                counts[item.user_id] = counts.get(item.user_id, 0) + 1
                sums[item.user_id] = sums.get(item.user_id, 0.0) + values[row]
                stacked = np.concatenate(
                    [table.domain_values[row], np.repeat(table.global_values[row][None, :], len(self.domains), axis=0)],
                    axis=1)
                normalized_sums[item.user_id] = normalized_sums.get(item.user_id, 0.0) + stacked

        names = DOMAIN_FEATURES + GLOBAL_FEATURES
        records = []
        for user_id in user_order:
            verdict = (verdicts or {}).get(user_id)
            if user_id in counts:
                mean = sums[user_id] / counts[user_id]
                mean_normalized = normalized_sums[user_id] / counts[user_id]
                credibility = {domain: float(mean[index]) for index, domain in enumerate(self.domains)}
                normalized = {domain: {name: float(mean_normalized[index, f_index]) for f_index, name in enumerate(names)}
                              for index, domain in enumerate(self.domains)}
                reason = None
            else:
                credibility = {domain: 0.0 for domain in self.domains}
                normalized = {domain: {name: 0.0 for name in names} for domain in self.domains}
                reason = REASON_NO_DOMAIN
            spam_flag = bool(verdict and verdict.flagged)
            if spam_flag:
                reason = verdict.reason
            records.append(CredibilityRecord(user_id=user_id, handle=handles[user_id], normalized=normalized,
                                             credibility=credibility, spam_flag=spam_flag, reason=reason))

        rankings = {}
        ranked_ids = set(counts)
        for domain in self.domains:
            candidates = [record for record in records if record.user_id in ranked_ids]
            rankings[domain] = sorted(candidates, key=lambda record: (-record.credibility[domain], record.user_id))
        return records, rankings

    def filter_spammers(self, features: Sequence[CredibilityFeatures]) -> Tuple[List[UserVerdict], List[UserVerdict]]:
        """
        Flag users whose domain breadth and tweet similarity both reach the thresholds.

        Chunked users are judged on their mean breadth and mean Twt_Sim.

        Returns:
            Tuple of (kept, flagged) verdicts in first-seen user order
        """
        grouped: Dict[str, List[CredibilityFeatures]] = {}
        for item in features:
            grouped.setdefault(item.user_id, []).append(item)

        kept, flagged = [], []
        for user_id, items in grouped.items():
            breadth = sum(item.breadth for item in items) / len(items)
            twt_sim = sum(item.twt_sim for item in items) / len(items)
            is_spam = breadth >= self.policy.breadth_threshold and twt_sim >= self.policy.repetition_threshold
            verdict = UserVerdict(user_id=user_id, handle=items[0].handle, breadth=breadth, twt_sim=twt_sim,
                                  flagged=is_spam, reason=REASON_SPAM if is_spam else None)
            (flagged if is_spam else kept).append(verdict)
        if flagged:
            logger.info("Flagged %d of %d users as spammers", len(flagged), len(grouped))
        return kept, flagged

    def score_users(self, records: Sequence[UserRecord]) -> CredibilityResult:
        """Run features, spam policy, normalization and ranking over all records."""
        features = [self.compute_features(record) for record in records]
        kept, flagged = self.filter_spammers(features)
        verdicts = {verdict.user_id: verdict for verdict in kept + flagged}
        credibility_records, rankings = self.credibility_rank(features, verdicts)
        return CredibilityResult(features=features, records=credibility_records, rankings=rankings,
                                 kept=kept, flagged=flagged)


def filter_facts(triples: Sequence[LabelTriple], flagged: Sequence[UserVerdict]) -> Tuple[List[LabelTriple], int]:
    """Drop triples whose subject or object names a flagged user."""
    banned = set()
    for verdict in flagged:
        banned.add(verdict.user_id)
        banned.add(verdict.handle)
    kept = [triple for triple in triples if triple[0] not in banned and triple[2] not in banned]
    return kept, len(triples) - len(kept)


def credibility_facts(result: CredibilityResult, domain: str, predicate: str = 'hasPoliticsInterest',
                      high: float = 0.5, medium: float = 0.2) -> List[LabelTriple]:
    """Interest-level facts for kept users from their credibility in one domain."""
    facts = []
    for record in result.records:
        if record.spam_flag or record.reason == REASON_NO_DOMAIN:
            continue
        value = record.credibility.get(domain, 0.0)
        level = 'High' if value >= high else 'Medium' if value >= medium else 'Low'
        facts.append((record.handle, predicate, level))
    return facts


def write_credibility_tsv(path: str, result: CredibilityResult, domains: Sequence[str]) -> None:
    """user-id, domain, credibility, spam-flag, reason; one row per user and domain."""
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for record in result.records:
            for domain in domains:
                handle.write(format_row([record.user_id, domain, record.credibility[domain],
                                         record.spam_flag, record.reason or '-']) + '\n')
