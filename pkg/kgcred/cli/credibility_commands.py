"""Credibility scoring and spam filtering commands."""

import argparse
import json

from ..models.credibility import CredibilityPolicy
from ..services.credibility_service import (
    CredibilityService, filter_facts, credibility_facts, write_credibility_tsv
)
from ..services.ingest_service import parse_user_records, parse_triples_tsv, write_triples_tsv
from .common import CommandContext

TOP_USERS = 5


def _service(args: argparse.Namespace, context: CommandContext):
    domains = context.domains()
    policy = context.pipeline.credibility
    if args.policy:
        with open(args.policy, 'r', encoding='utf-8') as handle:
            policy = CredibilityPolicy.from_dict(json.load(handle), policy)
    return CredibilityService(domains, policy), domains


def cred_score(args: argparse.Namespace, context: CommandContext) -> int:
    """Score users per domain and write credibility.tsv and interest facts."""
    service, domains = _service(args, context)
    result = service.score_users(parse_user_records(args.users, domains))
    output = context.output_path('credibility.tsv')
    write_credibility_tsv(output, result, domains)

    politics = context.politics_domain(domains)
    facts_path = context.output_path('credibility_facts.tsv')
    write_triples_tsv(facts_path, credibility_facts(result, politics))

    print(f"Scored {len(result.records)} users; flagged {len(result.flagged)} as spammers")
    for rank, record in enumerate(result.rankings[politics][:TOP_USERS], start=1):
        print(f"  {rank}. {record.handle}  {politics}: {record.credibility[politics]:.4f}")
    print(f"Credibility written to {output}")
    return 0


def cred_filter(args: argparse.Namespace, context: CommandContext) -> int:
    """Drop facts asserted about or by flagged users."""
    service, domains = _service(args, context)
    features = [service.compute_features(record) for record in parse_user_records(args.users, domains)]
    _, flagged = service.filter_spammers(features)
    kept, removed = filter_facts(parse_triples_tsv(args.triples), flagged)
    output = args.output or context.output_path('filtered_triples.tsv')
    write_triples_tsv(output, kept)
    for verdict in flagged:
        print(f"Flagged {verdict.handle} (breadth {verdict.breadth:.3f}, Twt_Sim {verdict.twt_sim:.3f})")
    print(f"Removed {removed} facts; {len(kept)} kept in {output}")
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser('cred-score', help='Rank users by domain credibility')
    parser.add_argument('--users', required=True, help='JSONL user records')
    parser.add_argument('--policy', help='JSON weights and thresholds')
    parser.set_defaults(handler=cred_score)

    parser = subparsers.add_parser('cred-filter', help='Remove facts tied to flagged users')
    parser.add_argument('--users', required=True, help='JSONL user records')
    parser.add_argument('--triples', required=True, help='Triple file to filter')
    parser.add_argument('--policy', help='JSON weights and thresholds')
    parser.add_argument('--output', help='Filtered triple file (default: <out>/filtered_triples.tsv)')
    parser.set_defaults(handler=cred_filter)
