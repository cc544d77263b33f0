"""Clustering, projection and export commands."""

import argparse
from typing import Dict

from ..services.analytics_service import (
    kmeans, pca_project, select_entities, cluster_purity, export_projector,
    write_clusters_tsv, write_projection_tsv, plot_projection
)
from ..services.graph_service import KnowledgeGraph
from .common import CommandContext, add_graph_flags


def _reference_labels(graph: KnowledgeGraph, relation: str) -> Dict[int, str]:
    """Object label of `relation` for every subject that has one (first fact wins)."""
    relation_id = graph.relations.require_id(relation)
    reference: Dict[int, str] = {}
    for triple in graph.triples:
        if triple.predicate == relation_id and triple.subject not in reference:
            reference[triple.subject] = graph.entities.label_of(triple.object)
    return reference


def _vectors(args: argparse.Namespace, context: CommandContext):
    graph = context.load_graph(args.graph)
    params = context.load_params(args.checkpoint, graph)
    ids = select_entities(graph.entities, prefix=args.prefix, ids=args.ids)
    if args.relation_subjects:
        subjects = set(_reference_labels(graph, args.relation_subjects))
        ids = [entity_id for entity_id in ids if entity_id in subjects]
    return graph, params.entities[ids], ids


def cluster(args: argparse.Namespace, context: CommandContext) -> int:
    """K-means over selected entity embeddings."""
    graph, vectors, ids = _vectors(args, context)
    assignment = kmeans(vectors, clusters=args.clusters, seed=context.seed, max_iter=args.max_iter,
                        metric=args.metric, entity_ids=ids)
    output = context.output_path('clusters.tsv')
    write_clusters_tsv(output, assignment, graph.entities)
    sizes = [int((assignment.labels == label).sum()) for label in range(args.clusters)]
    print(f"K-means: {args.clusters} clusters over {len(ids)} entities, inertia {assignment.inertia:.4f} "
          f"after {assignment.iterations} iterations; sizes {sizes}")
    if args.reference_relation:
        purity = cluster_purity(assignment, _reference_labels(graph, args.reference_relation))
        print(f"Purity against {args.reference_relation}: {purity:.4f}")
    print(f"Clusters written to {output}")
    return 0


def project(args: argparse.Namespace, context: CommandContext) -> int:
    """PCA projection of selected entity embeddings."""
    graph, vectors, ids = _vectors(args, context)
    projection = pca_project(vectors, dims=args.dims, entity_ids=ids)
    output = context.output_path('projection.tsv')
    write_projection_tsv(output, projection, graph.entities)
    ratios = ', '.join(f"{value:.4f}" for value in projection.explained_variance_ratio)
    print(f"Explained variance ratios: {ratios}")
    if projection.zero_variance:
        print("Embeddings have zero variance; projection is all zeros")
    if args.plot:
        labels = [graph.entities.label_of(entity_id) for entity_id in ids]
        clusters = None
        if args.clusters:
            clusters = kmeans(vectors, clusters=args.clusters, seed=context.seed, entity_ids=ids).labels
        plot_projection(projection, args.plot, labels=labels, clusters=clusters)
        print(f"Plot written to {args.plot}")
    print(f"Projection written to {output}")
    return 0


def export(args: argparse.Namespace, context: CommandContext) -> int:
    """Write projector-compatible embeddings.tsv and metadata.tsv."""
    graph = context.load_graph(args.graph)
    params = context.load_params(args.checkpoint, graph)
    directory = args.dir or context.output_path('projector')
    embeddings_path, metadata_path = export_projector(params.entities, graph.entities.labels, directory)
    print(f"Projector files written to {embeddings_path} and {metadata_path}")
    return 0


def _add_selection_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--prefix', help='Only entities whose label starts with this prefix')
    parser.add_argument('--ids', type=int, nargs='+', help='Explicit entity ids')
    parser.add_argument('--relation-subjects', dest='relation_subjects',
                        help='Only subjects of this relation (e.g. memberOfParty)')


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser('cluster', help='K-means over entity embeddings')
    add_graph_flags(parser)
    _add_selection_flags(parser)
    parser.add_argument('--clusters', type=int, default=4)
    parser.add_argument('--max-iter', dest='max_iter', type=int, default=300)
    parser.add_argument('--metric', choices=['euclidean', 'cosine'], default='euclidean')
    parser.add_argument('--reference-relation', dest='reference_relation',
                        help='Report cluster purity against this relation\'s objects')
    parser.set_defaults(handler=cluster)

    parser = subparsers.add_parser('project', help='PCA projection of entity embeddings')
    add_graph_flags(parser)
    _add_selection_flags(parser)
    parser.add_argument('--dims', type=int, choices=[2, 3], default=2)
    parser.add_argument('--plot', help='PNG scatter of the first two components')
    parser.add_argument('--clusters', type=int, help='Colour the plot by k-means clusters')
    parser.set_defaults(handler=project)

    parser = subparsers.add_parser('export-projector', help='Export embeddings for a projector')
    add_graph_flags(parser)
    parser.add_argument('--dir', help='Output directory (default: <out>/projector)')
    parser.set_defaults(handler=export)
