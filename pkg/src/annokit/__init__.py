"""annokit: planning, distribution, compilation and reliability analysis
for multi-annotator labeling projects."""

__version__ = "0.1.0"

from .agreement import (
    AgreementMetric,
    AnnotatorGraph,
    build_graph,
    cohen_kappa,
    cosine_agreement,
    fleiss_kappa,
    intra_agreement,
    krippendorff_alpha,
    multi_label_agreement,
    pair_values,
    pairwise_agreement,
)
from .compilation import (
    ProjectBundle,
    compile_annotations,
    compile_archive,
    concat_annotations,
    generate_project,
    make_zip_bytes,
    unpack_archive,
)
from .distribution import (
    Allocation,
    AnnotatorAssignment,
    ResourceSpec,
    allocation_tables,
    distribute,
    redistribute,
    solve_resources,
)
from .labels import (
    GeneratorSpec,
    annotation_prob_labels,
    from_annotations,
    sample_hard_labels,
    sample_prob_labels,
)
from .model import (
    LabelMapping,
    ProjectConfig,
    detect_annotators,
    infer_label_mapping,
    read_frame,
    validate_frame,
    write_frame,
)
from .reliability import (
    ReliabilityConfig,
    ReliabilityReport,
    compute_reliability,
    get_user_reliability,
)
from .viz import export_graph_2d, export_graph_3d, export_heatmap, heatmap_matrix

__all__ = [
    "__version__",
    "AgreementMetric",
    "Allocation",
    "AnnotatorAssignment",
    "AnnotatorGraph",
    "GeneratorSpec",
    "LabelMapping",
    "ProjectBundle",
    "ProjectConfig",
    "ReliabilityConfig",
    "ReliabilityReport",
    "ResourceSpec",
    "allocation_tables",
    "annotation_prob_labels",
    "build_graph",
    "cohen_kappa",
    "compile_annotations",
    "compile_archive",
    "compute_reliability",
    "concat_annotations",
    "cosine_agreement",
    "detect_annotators",
    "distribute",
    "export_graph_2d",
    "export_graph_3d",
    "export_heatmap",
    "fleiss_kappa",
    "from_annotations",
    "generate_project",
    "get_user_reliability",
    "heatmap_matrix",
    "infer_label_mapping",
    "intra_agreement",
    "krippendorff_alpha",
    "make_zip_bytes",
    "multi_label_agreement",
    "pair_values",
    "pairwise_agreement",
    "read_frame",
    "redistribute",
    "sample_hard_labels",
    "sample_prob_labels",
    "solve_resources",
    "unpack_archive",
    "validate_frame",
    "write_frame",
]
