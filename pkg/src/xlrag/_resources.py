"""Access to packaged data files (templates, locale tables, stopword lists)."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .errors import ConfigError


def _root():
    return resources.files("xlrag") / "resources"


@lru_cache(maxsize=None)
def load_text(relpath: str) -> str:
    """Read a UTF-8 resource file, removing exactly one trailing newline.

    Resource files are stored with a POSIX trailing newline that is not
    part of the template content.
    """
    node = _root()
    for part in relpath.split("/"):
        node = node / part
    try:
        raw = node.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"missing packaged resource: {relpath}") from exc
    return raw.removesuffix("\n")


@lru_cache(maxsize=None)
def load_json(relpath: str) -> dict:
    raw = load_text(relpath)
    return json.loads(raw)


@lru_cache(maxsize=None)
def load_stopwords(lang: str) -> frozenset[str]:
    """One token per line, UTF-8."""
    text = load_text(f"stopwords/{lang}.txt")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())
