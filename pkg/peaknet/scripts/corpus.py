"""
Parsing of scene-segmented scripts, alias maps and node lists.

Scenes file (.scenes): one scene per line, character names separated by "|".
Alias file (.alias): one "alias => canonical" mapping per line.
Both formats skip blank lines and lines starting with "#".
"""

import logging
import os
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Tuple

from .errors import ScenesParseError

logger = logging.getLogger(__name__)

SCENE_SEPARATOR = "|"
ALIAS_ARROW = "=>"
COMMENT_PREFIX = "#"


@dataclass(frozen=True)
class SceneSequence:
    """Ordered scenes, each an ordered tuple of distinct canonical names."""

    scenes: Tuple[Tuple[str, ...], ...]
    source_name: str = "<string>"

    def __len__(self) -> int:
        return len(self.scenes)

    def __iter__(self) -> Iterator[Tuple[str, ...]]:
        return iter(self.scenes)

    @property
    def characters(self) -> List[str]:
        """Distinct names in order of first appearance."""
        seen: Dict[str, None] = {}
        for scene in self.scenes:
            for name in scene:
                seen.setdefault(name, None)
        return list(seen)


class ParsedScenes(NamedTuple):
    sequence: SceneSequence
    duplicates: int


class AliasMap(Mapping[str, str]):
    """Read-only alias -> canonical mapping with no resolution chains."""

    def __init__(self, entries: Optional[Mapping[str, str]] = None):
        self._entries: Dict[str, str] = dict(entries or {})
        chained = sorted(c for c in self._entries.values() if c in self._entries)
        if chained:
            raise ValueError(f"Alias chain through: {', '.join(chained)}")

    def __getitem__(self, alias: str) -> str:
        return self._entries[alias]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def resolve(self, name: str) -> str:
        """Return the canonical form of name (unknown names pass through)."""
        return self._entries.get(name, name)

    def __repr__(self) -> str:
        return f"AliasMap({self._entries!r})"


def _is_skipped(line: str) -> bool:
    stripped = line.strip()
    return not stripped or stripped.startswith(COMMENT_PREFIX)


def _split_lines(text: str) -> List[str]:
    # Only "\n" counts as a line break so line numbers match what editors show
    return [line[:-1] if line.endswith("\r") else line for line in text.split("\n")]


def _line_count(text: str) -> int:
    if not text:
        return 0
    return text.count("\n") + (0 if text.endswith("\n") else 1)


def parse_scenes(text: str, source: str = "<string>") -> ParsedScenes:
    """
    Parse the contents of a scenes file.

    Args:
        text: Decoded file contents
        source: Label used in error messages and stored on the sequence

    Returns:
        The scene sequence and the number of within-scene duplicates collapsed

    Raises:
        ScenesParseError: On an empty name between separators, or when the
            text holds no scenes at all
    """
    scenes: List[Tuple[str, ...]] = []
    duplicates = 0

    for line_no, line in enumerate(_split_lines(text), start=1):
        if _is_skipped(line):
            continue

        names = [part.strip() for part in line.split(SCENE_SEPARATOR)]
        if any(not name for name in names):
            raise ScenesParseError("empty character name", line_no, source)

        scene = tuple(dict.fromkeys(names))
        if len(scene) != len(names):
            collapsed = len(names) - len(scene)
            duplicates += collapsed
            logger.warning(f"{source}:{line_no}: collapsed {collapsed} repeated name(s)")
        scenes.append(scene)

    if not scenes:
        raise ScenesParseError("no scenes", _line_count(text), source)

    logger.debug(f"Parsed {len(scenes)} scenes from {source}")
    return ParsedScenes(SceneSequence(tuple(scenes), source), duplicates)


def _decode(data: bytes, source: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        raise ScenesParseError("invalid UTF-8", line, source) from e


def parse_scenes_bytes(data: bytes, source: str = "<bytes>") -> ParsedScenes:
    """Decode UTF-8 bytes and parse them as a scenes file."""
    return parse_scenes(_decode(data, source), source)


def serialize_scenes(seq: SceneSequence) -> str:
    """
    Render a scene sequence in the scenes file format.

    Raises:
        ValueError: If a name cannot be written back unambiguously
    """
    lines = []
    for scene in seq.scenes:
        for name in scene:
            if SCENE_SEPARATOR in name or "\n" in name or name != name.strip() or not name:
                raise ValueError(f"Cannot serialize character name {name!r}")
        if scene and scene[0].startswith(COMMENT_PREFIX):
            raise ValueError(f"Scene would be read back as a comment: {scene!r}")
        lines.append(SCENE_SEPARATOR.join(scene))
    return "".join(f"{line}\n" for line in lines)


def parse_aliases(text: str, source: str = "<string>") -> AliasMap:
    """
    Parse the contents of an alias file.

    Args:
        text: Decoded file contents
        source: Label used in error messages

    Returns:
        The validated alias map

    Raises:
        ScenesParseError: On malformed lines, conflicting entries or chains
    """
    entries: Dict[str, str] = {}
    lines: Dict[str, int] = {}

    for line_no, line in enumerate(_split_lines(text), start=1):
        if _is_skipped(line):
            continue
        if ALIAS_ARROW not in line:
            raise ScenesParseError(f"expected 'alias {ALIAS_ARROW} canonical'", line_no, source)

        alias, canonical = (part.strip() for part in line.split(ALIAS_ARROW, 1))
        if not alias or not canonical:
            raise ScenesParseError("empty alias or canonical name", line_no, source)
        if alias == canonical:
            logger.warning(f"{source}:{line_no}: ignoring identity alias '{alias}'")
            continue
        if alias in entries and entries[alias] != canonical:
            raise ScenesParseError(
                f"'{alias}' already maps to '{entries[alias]}'", line_no, source
            )
        entries[alias] = canonical
        lines.setdefault(alias, line_no)

    for alias, canonical in entries.items():
        if canonical in entries:
            raise ScenesParseError(
                f"alias chain '{alias}' -> '{canonical}' -> '{entries[canonical]}'",
                lines[canonical],
                source,
            )

    return AliasMap(entries)


def resolve_aliases(seq: SceneSequence, aliases: AliasMap) -> SceneSequence:
    """
    Replace every name by its canonical form.

    Names that merge inside one scene are kept once, at their first position.
    """
    scenes = tuple(
        tuple(dict.fromkeys(aliases.resolve(name) for name in scene)) for scene in seq.scenes
    )
    return SceneSequence(scenes, seq.source_name)


def parse_node_list(text: str, source: str = "<string>") -> List[str]:
    """Parse a node-list file: one name per line, duplicates dropped."""
    names: Dict[str, None] = {}
    for line in _split_lines(text):
        if not _is_skipped(line):
            names.setdefault(line.strip(), None)
    return list(names)


def _read_bytes(path: str) -> bytes:
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    with open(path, "rb") as f:
        return f.read()


def load_scenes(path: str, aliases_path: Optional[str] = None) -> ParsedScenes:
    """
    Read a scenes file and, optionally, apply an alias file to it.

    Args:
        path: Path to the .scenes file
        aliases_path: Optional path to the .alias file

    Returns:
        The (alias-resolved) scene sequence and the duplicate count
    """
    parsed = parse_scenes_bytes(_read_bytes(path), path)
    logger.info(f"Loaded {len(parsed.sequence)} scenes from {path}")

    if aliases_path:
        aliases = parse_aliases(_decode(_read_bytes(aliases_path), aliases_path), aliases_path)
        logger.info(f"Applying {len(aliases)} aliases from {aliases_path}")
        parsed = ParsedScenes(resolve_aliases(parsed.sequence, aliases), parsed.duplicates)

    return parsed


def load_node_list(path: str) -> List[str]:
    """Read a node-list file (e.g. the law enforcement characters to remove)."""
    return parse_node_list(_decode(_read_bytes(path), path), path)
