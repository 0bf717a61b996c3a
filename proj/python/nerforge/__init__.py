"""Silver-standard hierarchical NER corpus generation from Wikipedia/DBpedia.

Thin wrapper over the C++ core. The extension module lives inside the
package in wheel installs and on PYTHONPATH in build-tree checkouts.
"""

try:
    from ._nerforge import (
        PipelineConfig,
        PriorityTable,
        UnerMapping,
        annotate_text,
        augment_corpus,
        build_gazetteer,
        compute_stats,
        extract_documents,
        map_to_uner,
        normalize_title,
        resolve_class,
        run_pipeline,
        sample_gazetteer,
        split_sentences,
        strip_and_link,
        tag_entity,
        tokenize,
    )
except ImportError:  # running against the plain CMake build tree
    from _nerforge import (
        PipelineConfig,
        PriorityTable,
        UnerMapping,
        annotate_text,
        augment_corpus,
        build_gazetteer,
        compute_stats,
        extract_documents,
        map_to_uner,
        normalize_title,
        resolve_class,
        run_pipeline,
        sample_gazetteer,
        split_sentences,
        strip_and_link,
        tag_entity,
        tokenize,
    )

__all__ = [
    "PipelineConfig",
    "PriorityTable",
    "UnerMapping",
    "annotate_text",
    "augment_corpus",
    "build_gazetteer",
    "compute_stats",
    "extract_documents",
    "map_to_uner",
    "normalize_title",
    "resolve_class",
    "run_pipeline",
    "sample_gazetteer",
    "split_sentences",
    "strip_and_link",
    "tag_entity",
    "tokenize",
]
