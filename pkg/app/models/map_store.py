import logging
import os
import re
from typing import Optional, Tuple

from app.exceptions import ParseError
from app.models.piecewise_map import PiecewiseMap
from app.services.corpus import ExampleCorpus
from app.services.map_file import parse_map_text, serialize_map

CORPUS_PREFIX = 'corpus:'
CORPUS_REFERENCE = re.compile(r'^corpus:([^,\s]+)(?:,n=(\d+))?$')


def parse_corpus_reference(source: str) -> Tuple[str, Optional[int]]:
    """Split `corpus:NAME[,n=K]` into (NAME, K)"""
    match = CORPUS_REFERENCE.match(source.strip())
    if match is None:
        raise ParseError(f"invalid corpus reference '{source}' (expected corpus:NAME[,n=K])", 1, 1)
    n = match.group(2)
    return match.group(1), int(n) if n is not None else None


class MapStore:
    """Loads maps from map files or corpus references and writes map files"""

    # Class-level corpus so every store shares one registry
    _corpus = None

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        if MapStore._corpus is None:
            MapStore._corpus = ExampleCorpus()
        self.corpus = MapStore._corpus

    @staticmethod
    def is_corpus_reference(source: str) -> bool:
        return source.strip().startswith(CORPUS_PREFIX)

    def load(self, source: str) -> PiecewiseMap:
        """Load a map from a file path or a `corpus:NAME[,n=K]` reference"""
        try:
            if self.is_corpus_reference(source):
                name, n = parse_corpus_reference(source)
                return self.corpus.build(name, n)
            if not os.path.exists(source):
                raise FileNotFoundError(f"Map file not found: {source}")
            with open(source, encoding='utf-8') as handle:
                F = parse_map_text(handle.read())
            self.logger.info(f"Map loaded: {source}")
            return F
        except Exception as e:
            self.logger.error(f"Error loading map {source}: {str(e)}")
            raise

    def loads(self, text: str) -> PiecewiseMap:
        return parse_map_text(text)

    def save(self, F: PiecewiseMap, file_path: str) -> str:
        """Write F as a map file and return the text written"""
        text = serialize_map(F)
        try:
            with open(file_path, 'w', encoding='utf-8') as handle:
                handle.write(text)
            self.logger.info(f"Map written: {file_path}")
            return text
        except Exception as e:
            self.logger.error(f"Error writing map {file_path}: {str(e)}")
            raise
