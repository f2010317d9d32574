"""Toolkit for building infobox table/image generation datasets from
Wikipedia article HTML and scoring generated tables."""

from .emit import (
    CropGeometry,
    PromptedExample,
    emit_dataset,
    format_image_prompt,
    format_table_prompt,
    image_gen_geometry,
    recognize_prompt,
    table_gen_geometry,
)
from .extract import (
    ExtractionReport,
    ImageRef,
    InfoboxRecord,
    extract_infoboxes,
    normalize_caption,
    strip_reference_links,
)
from .metrics import (
    BootstrapResult,
    CellMultiset,
    MetricReport,
    PRF,
    clipped_match,
    corpus_f1,
    evaluate,
    paired_bootstrap,
    rouge_l,
    rouge_n,
    rouge_preprocess,
    table_f1,
)
from .model import (
    Cell,
    GroupCell,
    InfoboxTable,
    PairCell,
    TableParseError,
    TypedElement,
    delinearize,
    linearize,
    sanitize_text,
    typed_elements,
)
from .split import SplitLabel, assign_split

__version__ = "0.1.0"

__all__ = [
    "BootstrapResult",
    "Cell",
    "CellMultiset",
    "CropGeometry",
    "ExtractionReport",
    "GroupCell",
    "ImageRef",
    "InfoboxRecord",
    "InfoboxTable",
    "MetricReport",
    "PRF",
    "PairCell",
    "PromptedExample",
    "SplitLabel",
    "TableParseError",
    "TypedElement",
    "assign_split",
    "clipped_match",
    "corpus_f1",
    "delinearize",
    "emit_dataset",
    "evaluate",
    "extract_infoboxes",
    "format_image_prompt",
    "format_table_prompt",
    "image_gen_geometry",
    "linearize",
    "normalize_caption",
    "paired_bootstrap",
    "recognize_prompt",
    "rouge_l",
    "rouge_n",
    "rouge_preprocess",
    "sanitize_text",
    "strip_reference_links",
    "table_f1",
    "table_gen_geometry",
    "typed_elements",
    "__version__",
]
