"""
Text formats for codes, words and grids, plus JSON reports and CSV sweeps.

Generator file:
    # tag: hadamard(q=2,k=2)
    2 4 2
    0 0 1 1
    0 1 0 1

Word file (`*` marks an erasure):
    2 4
    0 * 1 1

Grid file:
    2 4 2
    0 0
    * 1
    ...

Symbols are base-p integer encodings; `#` starts a comment anywhere.
"""

import dataclasses
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from .datatypes import MatrixWord, Word
from .errors import ParseError
from .field import field_new
from .linear_code import LinearCode

logger = logging.getLogger(__name__)

ERASURE_TOKEN = '*'
TAG_PREFIX = '# tag:'


def _content_lines(text: str) -> List[Tuple[int, str]]:
    """(1-based line number, content) for every line that is not blank or a comment"""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].rstrip()
        if content.strip():
            lines.append((number, content))
    return lines


def _tokens(line: str) -> List[Tuple[int, str]]:
    """(1-based column, token) pairs"""
    found, column = [], 0
    for part in line.split():
        column = line.index(part, column)
        found.append((column + 1, part))
        column += len(part)
    return found


def _parse_int(token: str, line: int, column: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer {what}, got '{token}'", line, column)


def _parse_symbol(token: str, q: int, line: int, column: int, allow_erasure: bool) -> Optional[int]:
    if token == ERASURE_TOKEN:
        if not allow_erasure:
            raise ParseError("erasures are not allowed here", line, column)
        return None
    value = _parse_int(token, line, column, 'symbol')
    if not 0 <= value < q:
        raise ParseError(f"symbol {value} is not an element of GF({q}) (expected 0..{q - 1})", line, column)
    return value


def _parse_header(lines: List[Tuple[int, str]], count: int, names: str) -> Tuple[int, List[int]]:
    if not lines:
        raise ParseError(f"missing header line '{names}'", 1)
    number, content = lines[0]
    tokens = _tokens(content)
    if len(tokens) != count:
        raise ParseError(f"header must be '{names}', got {len(tokens)} fields", number)
    return number, [_parse_int(tok, number, col, names.split()[i]) for i, (col, tok) in enumerate(tokens)]


def _parse_rows(lines: List[Tuple[int, str]], q: int, n_rows: int, n_cols: int,
                allow_erasure: bool) -> List[Tuple[Optional[int], ...]]:
    body = lines[1:]
    if len(body) != n_rows:
        at = body[n_rows][0] if len(body) > n_rows else (body[-1][0] + 1 if body else lines[0][0] + 1)
        raise ParseError(f"expected {n_rows} rows, found {len(body)}", at)
    rows = []
    for number, content in body:
        tokens = _tokens(content)
        if len(tokens) != n_cols:
            column = tokens[n_cols][0] if len(tokens) > n_cols else len(content) + 1
            raise ParseError(f"expected {n_cols} symbols, found {len(tokens)}", number, column)
        rows.append(tuple(_parse_symbol(tok, q, number, col, allow_erasure) for col, tok in tokens))
    return rows


def parse_code(text: str, default_tag: str = 'code') -> LinearCode:
    tag = default_tag
    for raw in text.splitlines():
        if raw.strip().startswith(TAG_PREFIX):
            tag = raw.strip()[len(TAG_PREFIX):].strip()
            break

    lines = _content_lines(text)
    number, (q, n, k) = _parse_header(lines, 3, 'q n k')
    if q < 2:
        raise ParseError(f"q must be a prime power, got {q}", number)
    field = field_new(q)
    rows = _parse_rows(lines, q, k, n, allow_erasure=False)
    return LinearCode(field, np.array(rows, dtype=np.int64), tag=tag)


def format_code(code: LinearCode) -> str:
    lines = [f"{TAG_PREFIX} {code.tag}", f"{code.q} {code.n} {code.k}"]
    lines += [' '.join(str(int(v)) for v in row) for row in code.generator]
    return '\n'.join(lines) + '\n'


def read_code(path: Path) -> LinearCode:
    path = Path(path)
    logger.debug(f"Reading generator matrix from {path}")
    return parse_code(path.read_text(encoding='utf-8'), default_tag=path.stem)


def write_code(path: Path, code: LinearCode) -> None:
    Path(path).write_text(format_code(code), encoding='utf-8')
    logger.info(f"Wrote {code.tag} to {path}")


def parse_word(text: str) -> Word:
    lines = _content_lines(text)
    _, (q, n) = _parse_header(lines, 2, 'q n')
    rows = _parse_rows(lines, q, 1, n, allow_erasure=True)
    return Word(q, rows[0])


def format_word(word: Word) -> str:
    return f"{word.q} {word.n}\n{word}\n"


def read_word(path: Path) -> Word:
    return parse_word(Path(path).read_text(encoding='utf-8'))


def write_word(path: Path, word: Word) -> None:
    Path(path).write_text(format_word(word), encoding='utf-8')


def parse_grid(text: str) -> MatrixWord:
    lines = _content_lines(text)
    _, (q, n_rows, n_cols) = _parse_header(lines, 3, 'q rows cols')
    return MatrixWord(q, tuple(_parse_rows(lines, q, n_rows, n_cols, allow_erasure=True)))


def format_grid(grid: MatrixWord) -> str:
    return f"{grid.q} {grid.n_rows} {grid.n_cols}\n{grid}\n"


def read_grid(path: Path) -> MatrixWord:
    return parse_grid(Path(path).read_text(encoding='utf-8'))


def write_grid(path: Path, grid: MatrixWord) -> None:
    Path(path).write_text(format_grid(grid), encoding='utf-8')


def parse_rational(text: str) -> Fraction:
    """'p/q', an integer or a decimal string"""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"'{text}' is not a rational number like 3/8", 1)


# Reports

def jsonable(obj: Any) -> Any:
    """Plain JSON structure; fractions become 'p/q' strings"""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return value
    if isinstance(obj, Word):
        return str(obj)
    if isinstance(obj, MatrixWord):
        return [' '.join('*' if s is None else str(s) for s in row) for row in obj.rows]
    if isinstance(obj, nx.Graph):
        return {'nodes': obj.number_of_nodes(), 'edges': sorted([sorted(e) for e in obj.edges()])}
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, Path):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    return str(obj)


def to_json(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False)


def write_json(obj: Any, path: Optional[Path] = None) -> str:
    """Serialise obj; write it to path when one is given"""
    text = to_json(obj)
    if path is not None:
        Path(path).write_text(text + '\n', encoding='utf-8')
        logger.info(f"Wrote report to {path}")
    return text


def write_sweep_csv(path: Path, rows: Iterable[Dict[str, Any]]) -> None:
    """Flat CSV of sweep rows, columns in first-seen order"""
    rows = [jsonable(row) for row in rows]
    columns: List[str] = []
    for row in rows:
        columns += [c for c in row if c not in columns]
    df = pd.DataFrame(rows, columns=columns)
    df.to_csv(path, index=False)
    logger.info(f"Wrote {len(df)} sweep rows to {path}")


def read_sweep_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path)
