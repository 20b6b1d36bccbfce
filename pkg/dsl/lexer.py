"""
Tokenizer for the .gsys gauge system language.
"""
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Union

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import GsysError


class ParseError(GsysError):
    """Syntax or semantic error with a 1-based line/column and the expected tokens."""

    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected: FrozenSet[str] = frozenset(expected)
        self.detail = message
        where = f"line {line}, column {column}"
        suffix = f" (expected {', '.join(sorted(self.expected))})" if self.expected else ''
        super().__init__(f"{where}: {message}{suffix}")


KEYWORDS = frozenset({
    'coords', 'constraint', 'gauge', 'vector', 'bivector', 'multivector', 'dynamics', 'form',
    'connection', 'structure', 'master', 'bounds', 'check', 'wedge',
})

PUNCTUATION = frozenset('+-*/^(),;=:[]')

MAX_INT_DIGITS = 1000


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, DERIV, KEYWORD, punctuation character, or EOF
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<deriv>d/d[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[-+*/^(),;=:\[\]])
""", re.VERBOSE)


def decode_source(source: Union[str, bytes]) -> str:
    if isinstance(source, str):
        return source
    try:
        return source.decode('utf-8')
    except UnicodeDecodeError as exc:
        before = source[:exc.start]
        line = before.count(b'\n') + 1
        column = exc.start - (before.rfind(b'\n') + 1) + 1
        raise ParseError("input is not valid UTF-8", line, column, ('UTF-8 text',))


def tokenize(source: Union[str, bytes]) -> List[Token]:
    text = decode_source(source)
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column, ('token',))
        kind = match.lastgroup
        value = match.group()
        if kind == 'newline':
            line += 1
            line_start = match.end()
        elif kind == 'deriv':
            tokens.append(Token('DERIV', value[3:], line, column))
        elif kind == 'int':
            if len(value) > MAX_INT_DIGITS:
                raise ParseError(f"integer literal of {len(value)} digits is too long", line, column, ('INT',))
            tokens.append(Token('INT', value, line, column))
        elif kind == 'ident':
            tokens.append(Token('KEYWORD' if value in KEYWORDS else 'IDENT', value, line, column))
        elif kind == 'punct':
            tokens.append(Token(value, value, line, column))
        pos = match.end()
    tokens.append(Token('EOF', '', line, pos - line_start + 1))
    return tokens
