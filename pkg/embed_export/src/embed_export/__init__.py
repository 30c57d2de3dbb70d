"""Bridge from frozen vision checkpoints to audit-ready embedding files."""

from .data import load_dataset
from .extract import ExportSpec, export, extract_split, load_feature_extractor
from .writer import ExportError, parse_embedding_file, write_embedding_file

__version__ = "0.1.0"
