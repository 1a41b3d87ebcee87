"""Sectioned plain-text presentation format.

    # comment
    [kind name]            or  [kind name variant]
    @key value             metadata
    content line           relation, generator image, table row, ...

Variant defaults to ``adopted``.  Content lines keep their line numbers so
errors point back into the file.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

__all__ = ["Section", "FormatError", "parse_sections", "split_equation", "split_d_terms"]

_HEADER = re.compile(r"^\[\s*([A-Za-z_]+)\s+([A-Za-z0-9_+-]+)(?:\s+([A-Za-z]+))?\s*\]$")


class FormatError(ValueError):
    def __init__(self, message: str, source: str = "", line: int = 0):
        loc = f"{source}:{line}: " if source else ""
        super().__init__(loc + message)
        self.source = source
        self.line = line


@dataclass
class Section:
    kind: str
    name: str
    variant: str
    meta: Dict[str, str] = field(default_factory=dict)
    lines: List[Tuple[int, str]] = field(default_factory=list)
    source: str = ""
    explicit_variant: bool = False

    @property
    def location(self) -> str:
        return self.meta.get("location", "")

    def error(self, message: str, line: int = 0) -> FormatError:
        return FormatError(f"[{self.kind} {self.name}] {message}", self.source, line)

    def equations(self) -> List[Tuple[int, str, str]]:
        out = []
        for no, text in self.lines:
            try:
                lhs, rhs = split_equation(text)
            except ValueError as exc:
                raise self.error(str(exc), no) from None
            out.append((no, lhs, rhs))
        return out


def parse_sections(text: str, source: str = "") -> List[Section]:
    sections: List[Section] = []
    cur: Optional[Section] = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and _HEADER.match(line):
            m = _HEADER.match(line)
            cur = Section(m.group(1), m.group(2), m.group(3) or "adopted", source=source,
                          explicit_variant=m.group(3) is not None)
            sections.append(cur)
            continue
        if cur is None:
            raise FormatError("content before the first section header", source, no)
        if line.startswith("@"):
            key, _, value = line[1:].partition(" ")
            cur.meta[key.strip()] = value.strip()
        else:
            cur.lines.append((no, line))
    return sections


def load_files(paths: Iterable[Path]) -> List[Section]:
    out = []
    for p in paths:
        out.extend(parse_sections(Path(p).read_text(), str(Path(p).name)))
    return out


def split_equation(text: str) -> Tuple[str, str]:
    """Split ``lhs = rhs`` at the single top-level '='."""
    depth = 0
    pos = -1
    for j, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "=" and depth == 0:
            if pos >= 0:
                raise ValueError(f"more than one '=' in {text!r}")
            pos = j
    if pos < 0:
        raise ValueError(f"expected 'lhs = rhs', got {text!r}")
    return text[:pos].strip(), text[pos + 1 :].strip()


def split_commutator(text: str) -> Optional[Tuple[str, str]]:
    """``[x, y]`` -> (x, y); None if the text is not a bracket."""
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        return None
    inner = t[1:-1]
    depth = 0
    for j, ch in enumerate(inner):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return inner[:j].strip(), inner[j + 1 :].strip()
    return None


def split_d_terms(text: str) -> List[Tuple[str, str]]:
    """Split ``c1 d[x1] - c2 d[x2] + ...`` into (signed coefficient text, x text) pairs.

    A coefficient is everything between the previous top-level sign and ``d[``;
    an empty coefficient means 1.
    """
    out = []
    j = 0
    n = len(text)
    while j < n:
        m = text.find("d[", j)
        if m < 0:
            if text[j:].strip():
                raise ValueError(f"trailing text {text[j:]!r} outside any d[...] term")
            break
        # make sure 'd[' is not the tail of an identifier
        if m > 0 and (text[m - 1].isalnum() or text[m - 1] == "_"):
            raise ValueError(f"unexpected identifier before d[ in {text!r}")
        coef = text[j:m].strip()
        depth = 0
        k = m + 1
        while k < n:
            if text[k] == "[":
                depth += 1
            elif text[k] == "]":
                depth -= 1
                if depth == 0:
                    break
            k += 1
        if k >= n:
            raise ValueError(f"unbalanced d[ in {text!r}")
        arg = text[m + 2 : k]
        if coef in ("", "+"):
            coef = "1"
        elif coef == "-":
            coef = "-1"
        elif coef[0] not in "+-" and out:
            raise ValueError(f"missing sign before {coef!r}")
        out.append((coef.lstrip("+").strip() or "1", arg))
        j = k + 1
    return out
