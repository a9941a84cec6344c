"""Line-oriented block reader shared by all four text formats.

The surface syntax is deliberately small:

* a document is UTF-8 text; ``#`` at the start of a line (after indentation)
  makes the whole line a comment; blank lines are ignored;
* indentation is spaces only, two per nesting level;
* a line containing ``:`` is a field: everything before the first colon is
  the key, everything after (trimmed) is the value, kept verbatim to the end
  of the line;
* any other line opens a block: the first token is the keyword, the rest are
  header arguments; child fields and blocks are indented one level deeper.

The reader rejects rather than repairs: offending lines are skipped so that
several independent errors can be reported in one failure, but no partial
document is ever returned.
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from ..errors import RainError
from ..model import is_slug

HEADER_TOKEN_RE = re.compile(r"^[A-Za-z0-9_.*-]+$")


@dataclass(frozen=True)
class ParseError:
    """One diagnostic, pointing inside the source text."""

    line: int
    column: int
    expected: str
    found: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: expected {self.expected}, found {self.found!r}"

    def to_dict(self) -> dict:
        return {"line": self.line, "column": self.column, "expected": self.expected, "found": self.found}


class ParseFailure(RainError):
    """Raised with every collected diagnostic; never carries partial output."""

    code = "parse-error"

    def __init__(self, errors: Sequence[ParseError]):
        self.errors = sorted(errors, key=lambda e: (e.line, e.column))
        super().__init__("; ".join(str(e) for e in self.errors[:5]))


class Diagnostics:
    def __init__(self):
        self.errors: list[ParseError] = []

    def error(self, line: int, column: int, expected: str, found: str):
        self.errors.append(ParseError(line, column, expected, found))

    def raise_if_any(self):
        if self.errors:
            raise ParseFailure(self.errors)


@dataclass
class Field:
    line: int
    column: int
    key: str
    value: str


@dataclass
class Block:
    line: int
    column: int
    keyword: str
    args: tuple[str, ...]
    fields: list[Field] = dc_field(default_factory=list)
    children: list["Block"] = dc_field(default_factory=list)


def read_blocks(text: str) -> list[Block]:
    """Parse ``text`` into a block tree, raising on any syntactic problem."""
    diags = Diagnostics()
    roots: list[Block] = []
    # Stack of open blocks, index == nesting level.
    stack: list[Block] = []

    lines = text.split("\n")
    saw_content = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip()
        if not line.strip():
            continue
        indent_len = len(line) - len(line.lstrip())
        leading = line[:indent_len]
        if "\t" in leading:
            diags.error(lineno, leading.index("\t") + 1, "spaces for indentation", "tab")
            continue
        content = line[indent_len:]
        if content.startswith("#"):
            continue
        saw_content = True
        if indent_len % 2 != 0:
            diags.error(lineno, indent_len + 1, "an even number of indentation spaces", content[:20])
            continue
        level = indent_len // 2
        if level > len(stack):
            diags.error(lineno, indent_len + 1, f"indentation of at most {len(stack) * 2} spaces", content[:20])
            continue
        del stack[level:]
        column = indent_len + 1

        if ":" in content:
            key, _, value = content.partition(":")
            key = key.strip()
            value = value.strip()
            if not key:
                diags.error(lineno, column, "a field key before ':'", content[:20])
                continue
            if not stack:
                diags.error(lineno, column, "a block keyword at top level (fields belong inside blocks)", content[:20])
                continue
            stack[-1].fields.append(Field(lineno, column, key, value))
            continue

        tokens = content.split()
        bad = [t for t in tokens if not HEADER_TOKEN_RE.match(t)]
        if bad:
            diags.error(lineno, column, "header tokens (letters, digits, '-', '_', '.', '*')", bad[0])
            continue
        block = Block(lineno, column, tokens[0], tuple(tokens[1:]))
        if stack:
            stack[-1].children.append(block)
        else:
            roots.append(block)
        stack.append(block)

    if not saw_content:
        diags.error(1, 1, "a document with at least one block", "end of input")
    diags.raise_if_any()
    return roots


def single_root(text: str, keyword: str, description: str) -> Block:
    """Read a document that must consist of exactly one ``keyword`` block."""
    roots = read_blocks(text)
    diags = Diagnostics()
    if roots[0].keyword != keyword:
        diags.error(roots[0].line, roots[0].column, f"'{keyword}' ({description})", roots[0].keyword)
    for extra in roots[1:]:
        diags.error(extra.line, extra.column, "end of document (one top-level block)", extra.keyword)
    diags.raise_if_any()
    return roots[0]


class BlockView:
    """Validating accessor over one block; problems go to shared diagnostics."""

    def __init__(self, block: Block, diags: Diagnostics):
        self.block = block
        self.diags = diags

    # -- header ---------------------------------------------------------

    def slug_arg(self, index: int, expected: str) -> str | None:
        if index >= len(self.block.args):
            self.diags.error(self.block.line, self.block.column, expected, self.block.keyword)
            return None
        arg = self.block.args[index]
        if not is_slug(arg):
            self.diags.error(self.block.line, self.block.column, f"{expected} (lowercase slug)", arg)
            return None
        return arg

    def name_arg(self, index: int, expected: str) -> str | None:
        if index >= len(self.block.args):
            self.diags.error(self.block.line, self.block.column, expected, self.block.keyword)
            return None
        return self.block.args[index]

    def int_arg(self, index: int, expected: str) -> int | None:
        if index >= len(self.block.args):
            self.diags.error(self.block.line, self.block.column, expected, self.block.keyword)
            return None
        arg = self.block.args[index]
        if not arg.isdigit():
            self.diags.error(self.block.line, self.block.column, expected, arg)
            return None
        return int(arg)

    def no_extra_args(self, count: int):
        if len(self.block.args) > count:
            self.diags.error(
                self.block.line,
                self.block.column,
                f"{count} header argument(s)",
                " ".join(self.block.args[count:]),
            )

    # -- fields ---------------------------------------------------------

    def _single(self, key: str) -> Field | None:
        hits = [f for f in self.block.fields if f.key == key]
        if len(hits) > 1:
            self.diags.error(hits[1].line, hits[1].column, f"at most one '{key}' field", hits[1].value)
        return hits[0] if hits else None

    def text(self, key: str, required: bool = False, default: str | None = None) -> str | None:
        hit = self._single(key)
        if hit is None:
            if required:
                self.diags.error(self.block.line, self.block.column, f"a '{key}' field", self.block.keyword)
            return default
        if required and not hit.value:
            self.diags.error(hit.line, hit.column, f"a non-empty '{key}' value", "")
            return default
        return hit.value

    def texts(self, key: str) -> list[str]:
        return [f.value for f in self.block.fields if f.key == key]

    def int_value(self, key: str, required: bool = False, default: int | None = None) -> int | None:
        hit = self._single(key)
        if hit is None:
            if required:
                self.diags.error(self.block.line, self.block.column, f"a '{key}' field", self.block.keyword)
            return default
        if not hit.value.lstrip("-").isdigit():
            self.diags.error(hit.line, hit.column, f"an integer '{key}' value", hit.value)
            return default
        return int(hit.value)

    def id_list(self, key: str, required: bool = False) -> list[str]:
        hit = self._single(key)
        if hit is None:
            if required:
                self.diags.error(self.block.line, self.block.column, f"a '{key}' field", self.block.keyword)
            return []
        items = [part.strip() for part in hit.value.split(",")]
        ids = []
        for item in items:
            if not item:
                self.diags.error(hit.line, hit.column, f"comma-separated ids in '{key}'", hit.value)
                continue
            if not is_slug(item):
                self.diags.error(hit.line, hit.column, f"a lowercase slug in '{key}'", item)
                continue
            ids.append(item)
        seen = set()
        unique = []
        for item in ids:
            if item not in seen:
                seen.add(item)
                unique.append(item)
        if required and not unique:
            self.diags.error(hit.line, hit.column, f"at least one id in '{key}'", hit.value)
        return unique

    def choice(self, key: str, choices: Iterable[str], required: bool = False, default: str | None = None) -> str | None:
        choices = tuple(choices)
        hit = self._single(key)
        if hit is None:
            if required:
                self.diags.error(self.block.line, self.block.column, f"a '{key}' field", self.block.keyword)
            return default
        if hit.value not in choices:
            self.diags.error(hit.line, hit.column, f"'{key}' one of {', '.join(choices)}", hit.value)
            return default
        return hit.value

    def flag(self, key: str) -> bool:
        hit = self._single(key)
        if hit is None:
            return False
        if hit.value not in ("true", "false"):
            self.diags.error(hit.line, hit.column, f"'{key}' true or false", hit.value)
            return False
        return hit.value == "true"

    # -- children -------------------------------------------------------

    def children(self, keyword: str) -> list[Block]:
        return [c for c in self.block.children if c.keyword == keyword]

    def check_known(self, field_keys: Iterable[str] = (), field_patterns: Iterable[str] = (),
                    child_keywords: Iterable[str] = ()):
        keys = set(field_keys)
        patterns = [re.compile(p) for p in field_patterns]
        for f in self.block.fields:
            if f.key not in keys and not any(p.match(f.key) for p in patterns):
                self.diags.error(f.line, f.column, f"one of the fields: {', '.join(sorted(keys))}", f.key)
        kws = set(child_keywords)
        for child in self.block.children:
            if child.keyword not in kws:
                expected = f"one of the blocks: {', '.join(sorted(kws))}" if kws else "no nested blocks"
                self.diags.error(child.line, child.column, expected, child.keyword)


class Writer:
    """Canonical-form emitter: two-space indents, one trailing newline."""

    def __init__(self):
        self._lines: list[str] = []
        self._indent = 0

    def _check(self, text: str) -> str:
        if "\n" in text or "\r" in text:
            raise ValueError(f"text field contains a line break: {text!r}")
        return text

    def header(self, *tokens: str):
        self._lines.append("  " * self._indent + " ".join(self._check(t) for t in tokens if t))

    def field(self, key: str, value: str):
        self._lines.append("  " * self._indent + f"{self._check(key)}: {self._check(value)}".rstrip())

    @contextmanager
    def block(self, *tokens: str):
        self.header(*tokens)
        self._indent += 1
        try:
            yield
        finally:
            self._indent -= 1

    def text(self) -> str:
        return "\n".join(self._lines) + "\n"
