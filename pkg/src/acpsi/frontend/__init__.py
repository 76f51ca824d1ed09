"""Parsing, configuration loading, rendering, serialization, and the CLI."""

from .config import default_config, load_config
from .parser import SourceText, parse_term, scan_action_names, tokenize
from .render import export_lts, import_lts_json, render_term

__all__ = [
    "default_config", "load_config",
    "SourceText", "parse_term", "scan_action_names", "tokenize",
    "export_lts", "import_lts_json", "render_term",
]
