"""Canonical, hashable reports and their static HTML rendering."""

from .canonical import (
    CanonicalizationError,
    canonical_hash,
    canonical_json,
    sha256_hex,
    to_plain,
)
from .html import render_html
from .model import (
    DIGESTIBLE_KINDS,
    FIXED_EPOCH,
    REPORT_EXTENSION,
    REPORT_SCHEMA_VERSION,
    Digestible,
    Provenance,
    Report,
    ReportError,
    report_meta,
)
from .verify import VerifyResult, load_schema, verify_report

__all__ = [
    "CanonicalizationError",
    "DIGESTIBLE_KINDS",
    "Digestible",
    "FIXED_EPOCH",
    "Provenance",
    "REPORT_EXTENSION",
    "REPORT_SCHEMA_VERSION",
    "Report",
    "ReportError",
    "VerifyResult",
    "canonical_hash",
    "canonical_json",
    "load_schema",
    "render_html",
    "report_meta",
    "sha256_hex",
    "to_plain",
    "verify_report",
]
