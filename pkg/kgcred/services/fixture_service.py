"""Synthetic politics knowledge graph and social user records."""

import json
import logging
import os
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..models.records import UserRecord, Tweet, Reply, DomainScore
from ..services.ingest_service import write_triples_tsv, write_user_records, write_labelled_facts

logger = logging.getLogger(__name__)

PARTIES = ('Australian Labor Party', 'Liberal Party of Australia', 'Australian Greens')
STATES = ('Victoria', 'New South Wales', 'Queensland')
ELECTORATES = (
    ('Melbourne', 'Kooyong', 'Higgins', 'Wills', 'Batman'),
    ('Sydney', 'Grayndler', 'Wentworth', 'Warringah', 'Bennelong'),
    ('Brisbane', 'Griffith', 'Lilley', 'Ryan', 'Dickson'),
)
PARTY_TOPICS = (
    ('Medicare', 'Fair Wages', 'Trade Unions', 'Public Schools'),
    ('Tax Cuts', 'Border Security', 'Small Business', 'Defence Spending'),
    ('Climate Change', 'Renewable Energy', 'Refugee Policy', 'Old Growth Forests'),
)
FIRST_NAMES = ('Anthony', 'Penny', 'Tanya', 'Jim', 'Kristina', 'Richard', 'Mark', 'Linda', 'Sarah', 'Adam',
               'Jacinta', 'Peter', 'Karen', 'David', 'Michelle')
LAST_NAMES = ('Albright', 'Wongsaw', 'Pliberson', 'Chalford', 'Kennerly', 'Marlowe', 'Butlerton', 'Reynell',
              'Hansford', 'Bandtree', 'Dutter', 'Tehanson', 'Andrewes', 'Littlewood', 'Morrell')
POLITICIANS_PER_PARTY = 50
USERS_PER_PARTY = 6

PARLIAMENT = 'Australian Parliament'
POLITICIAN_TYPE = 'Politician'
SPAMMER_HANDLE = '@deals_everywhere'
POLITICS_USER_HANDLE = '@policy_watcher'

POLITICS_WORDS = ('vote', 'policy', 'budget', 'senate', 'election', 'reform', 'minister', 'debate', 'bill',
                  'parliament', 'campaign', 'law', 'funding', 'community', 'future', 'question', 'time', 'cabinet')

LabelTriple = Tuple[str, str, str]


def _politician_names(rng: np.random.Generator, count: int) -> List[str]:
    combos = [f"{first} {last}" for first in FIRST_NAMES for last in LAST_NAMES]
    order = rng.permutation(len(combos))[:count]
    return [combos[index] for index in order]


def _politics_tweet(rng: np.random.Generator, topic: str, politics_domain: str, extra_domain: str,
                    index: int) -> Tweet:
    words = list(rng.choice(POLITICS_WORDS, size=6, replace=False))
    text = f"{topic} {' '.join(words)} #{index}"
    sentiments = rng.uniform(-1.0, 1.0, size=int(rng.integers(0, 4)))
    return Tweet(
        text=text,
        urls=[f"https://news.example.org/politics/{topic.lower().replace(' ', '-')}/{index}"],
        retweets=int(rng.integers(0, 40)),
        likes=int(rng.integers(0, 120)),
        replies=[Reply(text='reply', sentiment=round(float(value), 3)) for value in sentiments],
        domain_scores=[DomainScore(politics_domain, round(float(rng.uniform(0.6, 0.95)), 3))],
        url_domain_scores=[DomainScore(politics_domain, round(float(rng.uniform(0.5, 0.9)), 3)),
                           DomainScore(extra_domain, round(float(rng.uniform(0.05, 0.3)), 3))]
    )


def _spammer_record(rng: np.random.Generator, domains: Sequence[str]) -> UserRecord:
    tweets = []
    for index, domain in enumerate(domains):
        tweets.append(Tweet(
            text=f"{domain.replace('_', ' ')} offer code{index} visit link{index}",
            urls=[f"https://deals{index}.example.com/offer/{index}"],
            retweets=int(rng.integers(0, 3)),
            likes=int(rng.integers(0, 5)),
            domain_scores=[DomainScore(domain, round(float(rng.uniform(0.5, 0.9)), 3))],
            url_domain_scores=[DomainScore(domain, round(float(rng.uniform(0.4, 0.8)), 3))]
        ))
    return UserRecord(user_id='u_spam', handle=SPAMMER_HANDLE, followers=248, friends=120, age_years=13.0,
                      tweets=tweets)


def build_fixture(seed: int, domains: Sequence[str], politics_domain: str
                  ) -> Tuple[List[LabelTriple], List[UserRecord], List[Tuple[str, str, str, bool]], Dict[str, List[str]]]:
    """
    Build the synthetic politics graph in memory.

    Returns:
        Tuple of (triples, user records, labelled facts, table columns)
    """
    rng = np.random.default_rng(seed)
    names = _politician_names(rng, POLITICIANS_PER_PARTY * len(PARTIES))
    extra_domain = next(domain for domain in domains if domain != politics_domain)

    triples: List[LabelTriple] = []
    members: List[Tuple[str, int]] = []
    table: Dict[str, List[str]] = {'politician': [], 'party': [], 'state': []}
    for index, name in enumerate(names):
        party_index = index // POLITICIANS_PER_PARTY
        party = PARTIES[party_index]
        members.append((name, party_index))
        triples.extend([
            (name, 'memberOfParty', party),
            (name, 'supports', party),
            (name, 'memberOfParliament', PARLIAMENT),
            (name, 'hasSubtype', POLITICIAN_TYPE),
            (name, 'hasLocation', STATES[party_index]),
        ])
        triples.extend((name, 'hasMentioned', topic) for topic in PARTY_TOPICS[party_index])
        table['politician'].append(name)
        table['party'].append(party)
        table['state'].append(STATES[party_index])

    for state, electorates in zip(STATES, ELECTORATES):
        triples.extend((electorate, 'hasLocation', state) for electorate in electorates)

    records: List[UserRecord] = []
    for party_index, party in enumerate(PARTIES):
        for number in range(USERS_PER_PARTY):
            handle = f"@voter_{party_index}{number:02d}"
            topics = PARTY_TOPICS[party_index]
            tweets = [_politics_tweet(rng, topics[tweet_index % len(topics)], politics_domain, extra_domain,
                                      tweet_index)
                      for tweet_index in range(int(rng.integers(3, 7)))]
            records.append(UserRecord(
                user_id=f"u_{party_index}{number:02d}",
                handle=handle,
                followers=int(rng.integers(50, 6000)),
                friends=int(rng.integers(50, 2000)),
                age_years=float(rng.integers(1, 14)),
                tweets=tweets
            ))
            triples.append((handle, 'supports', party))
            triples.append((handle, 'hasPoliticsInterest', 'High'))

    records.append(UserRecord(
        user_id='u_politics', handle=POLITICS_USER_HANDLE, followers=5606, friends=1437, age_years=7.0,
        tweets=[_politics_tweet(rng, PARTY_TOPICS[0][index % 4], politics_domain, extra_domain, index)
                for index in range(8)]
    ))
    triples.append((POLITICS_USER_HANDLE, 'supports', PARTIES[0]))
    triples.append((POLITICS_USER_HANDLE, 'hasPoliticsInterest', 'High'))

    records.append(_spammer_record(rng, domains))
    for party in PARTIES:
        triples.append((SPAMMER_HANDLE, 'supports', party))
    triples.append((SPAMMER_HANDLE, 'hasPoliticsInterest', 'Low'))
    triples.append((SPAMMER_HANDLE, 'hasMentioned', PARTY_TOPICS[1][0]))

    labelled: List[Tuple[str, str, str, bool]] = []
    for position in rng.permutation(len(members))[:40]:
        name, party_index = members[int(position)]
        wrong = (party_index + 1 + int(rng.integers(0, len(PARTIES) - 1))) % len(PARTIES)
        labelled.append((name, 'memberOfParty', PARTIES[party_index], True))
        labelled.append((name, 'memberOfParty', PARTIES[wrong], False))

    return triples, records, labelled, table


def generate_fixture(seed: int, directory: str, domains: Sequence[str], politics_domain: str) -> Dict[str, str]:
    """
    Write the fixture files; equal seeds give identical files.

    Returns:
        Mapping of file role to path
    """
    os.makedirs(directory, exist_ok=True)
    triples, records, labelled, table = build_fixture(seed, domains, politics_domain)
    paths = {
        'triples': os.path.join(directory, 'triples.tsv'),
        'users': os.path.join(directory, 'users.jsonl'),
        'labelled': os.path.join(directory, 'labelled_facts.tsv'),
        'table': os.path.join(directory, 'politicians.csv'),
        'mapping': os.path.join(directory, 'mapping.json'),
    }
    write_triples_tsv(paths['triples'], triples)
    write_user_records(paths['users'], records)
    write_labelled_facts(paths['labelled'], labelled)

    with open(paths['table'], 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(','.join(table) + '\n')
        for row in zip(*table.values()):
            handle.write(','.join(row) + '\n')

    rules = [
        {'subject_column': 'politician', 'predicate': 'memberOfParty', 'object_column': 'party'},
        {'subject_column': 'politician', 'predicate': 'hasLocation', 'object_column': 'state'},
        {'subject_column': 'politician', 'predicate': 'hasSubtype', 'object_constant': POLITICIAN_TYPE},
    ]
    with open(paths['mapping'], 'w', encoding='utf-8') as handle:
        json.dump({'rules': rules}, handle, indent=2)
        handle.write('\n')

    logger.info("Wrote fixture with %d triples and %d user records to %s", len(triples), len(records), directory)
    return paths
