"""
Input file checks: existence, size, extension, encoding
"""
import logging
import os

from app.config import settings
from app.core.errors import SourceError

logger = logging.getLogger(__name__)


def _read_bytes(path: str) -> bytes:
    if not os.path.isfile(path):
        raise SourceError(f"{path}: no such file")
    size = os.path.getsize(path)
    if size > settings.max_file_size:
        raise SourceError(f"{path}: file too large ({size} bytes, limit {settings.max_file_size})")
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        raise SourceError(f"{path}: {e.strerror}")


def _require_utf8(path: str, content: bytes) -> str:
    try:
        return content.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SourceError(f"{path}: not UTF-8 text (byte {e.start})")


def check_uiml_bytes(content: bytes, source_name: str = "<input>") -> None:
    """Encoding check shared by files and in-memory sources"""
    _require_utf8(source_name, content)


def read_source(path: str) -> bytes:
    """Raw bytes of a UIML source file that passed every check"""
    ext = path.lower().rsplit(".", 1)[-1] if "." in os.path.basename(path) else ""
    if ext not in settings.extension_list:
        raise SourceError(f"{path}: invalid extension, only {', '.join(settings.extension_list)} allowed")
    content = _read_bytes(path)
    check_uiml_bytes(content, path)
    logger.debug(f"✓ Source checks passed for {path}")
    return content


def read_json_source(path: str) -> str:
    """Text of a JSON input (vocabulary, mapping, hints, events, logical model)"""
    text = _require_utf8(path, _read_bytes(path))
    logger.debug(f"✓ Read {len(text)} characters from {path}")
    return text
