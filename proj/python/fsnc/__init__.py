"""Few-shot node classification benchmark: python bindings.

The heavy lifting happens in the C++ core; this package re-exports the
bound operations and adds no logic of its own.
"""

from ._core import (
    FsncError,
    Graph,
    View,
    __version__,
    build_view,
    gcn_normalize,
    generate_dataset,
    gradcheck,
    ingest,
    load_graph,
    run,
    sample_episodes,
    split_classes,
    summarize,
)

__all__ = [
    "FsncError",
    "Graph",
    "View",
    "__version__",
    "build_view",
    "gcn_normalize",
    "generate_dataset",
    "gradcheck",
    "ingest",
    "load_graph",
    "run",
    "sample_episodes",
    "split_classes",
    "summarize",
]
