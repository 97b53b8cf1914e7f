"""Procedure-call network extraction from C source trees.

This is a heuristic lexer, not a C parser.  Comments, string and character
literals and preprocessor directive lines are blanked first (positions are
preserved).  A function definition is then an identifier, a balanced
parameter list and a brace body at file scope.  A call is an identifier
followed by ``(`` inside a body.  Only callees defined somewhere in the tree
become edges.

Known blind spots: calls hidden inside function-like macros, calls through
function pointers or struct members, and definitions whose name is produced
by a macro.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyGraphError, LexError, ParseError
from .graph import DirectedGraph

KEYWORDS = frozenset(
    """
    if else while for do switch case default return sizeof goto break continue
    typeof __typeof__ __typeof alignof _Alignof __alignof__ _Generic _Static_assert
    asm __asm__ __asm volatile __volatile__ __attribute__ __extension__ defined
    int char short long signed unsigned float double void _Bool bool
    struct union enum const static extern register inline __inline__ __inline auto
    """.split()
)

LIMITATIONS = (
    "function-like macros are not expanded; calls made only inside macro bodies are missed",
    "calls through function pointers and struct members are not resolved",
    "every #if branch is scanned, giving a configuration-independent superset",
)

_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[0-9][A-Za-z0-9_.]*|\S")
_CALL = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?=\s*\()")
_KR_LOOKAHEAD = 200  # tokens of old-style parameter declarations


class UnbalancedError(ParseError):
    pass


@dataclass(frozen=True)
class ExtractOptions:
    extensions: tuple[str, ...] = (".c", ".h")
    workers: int = 1


@dataclass
class ExtractionReport:
    n_procedures: int = 0
    n_calls: int = 0
    skipped_files: list[tuple[str, str]] = field(default_factory=list)
    unresolved_call_names: int = 0
    n_files: int = 0
    multiply_defined: int = 0
    limitations: tuple[str, ...] = LIMITATIONS

    def to_dict(self) -> dict:
        return {
            "n_procedures": self.n_procedures,
            "n_calls": self.n_calls,
            "n_files": self.n_files,
            "skipped_files": [{"path": p, "reason": r} for p, r in self.skipped_files],
            "unresolved_call_names": self.unresolved_call_names,
            "multiply_defined": self.multiply_defined,
            "self_loops_kept": True,
            "multi_edges_collapsed": True,
            "limitations": list(self.limitations),
        }


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def strip_noise(source: str) -> str:
    """Blank comments, literals and preprocessor lines, keeping every newline."""
    out = list(source)
    n = len(source)
    i = 0
    at_line_start = True
    in_directive = False

    def blank(a, b):
        for k in range(a, b):
            if out[k] != "\n":
                out[k] = " "

    while i < n:
        c = source[i]
        nxt = source[i + 1] if i + 1 < n else ""
        if c == "/" and nxt == "*":
            end = source.find("*/", i + 2)
            if end < 0:
                raise LexError("unterminated comment", *_position(source, i))
            blank(i, end + 2)
            i = end + 2
            continue
        if c == "/" and nxt == "/":
            end = source.find("\n", i)
            end = n if end < 0 else end
            blank(i, end)
            i = end
            continue
        if c == "\n":
            if in_directive and i > 0 and source[i - 1] == "\\":
                i += 1
                continue
            in_directive = False
            at_line_start = True
            i += 1
            continue
        if in_directive:
            out[i] = " "
            i += 1
            continue
        if c in " \t\r\f\v":
            i += 1
            continue
        if c == "#" and at_line_start:
            in_directive = True
            out[i] = " "
            i += 1
            continue
        at_line_start = False
        if c in "\"'":
            j = i + 1
            while j < n and source[j] != c and source[j] != "\n":
                j += 2 if source[j] == "\\" else 1
            end = min(j + 1, n) if j < n and source[j] == c else min(j, n)
            blank(i, end)
            i = end
            continue
        i += 1
    return "".join(out)


def _match(tokens, start, open_, close):
    """Index of the token closing the group opened at ``start``, or -1."""
    depth = 0
    for k in range(start, len(tokens)):
        t = tokens[k][0]
        if t == open_:
            depth += 1
        elif t == close:
            depth -= 1
            if depth == 0:
                return k
    return -1


def _body_start(tokens, k):
    """Token index of the ``{`` opening a body right after a parameter list, or -1.

    Old-style parameter declarations (``f(a) int a; {``) are skipped.
    """
    if k < len(tokens) and tokens[k][0] == "{":
        return k
    j = k
    last = None
    limit = min(len(tokens), k + _KR_LOOKAHEAD)
    while j < limit and tokens[j][0] != "{":
        t = tokens[j][0]
        if not (t[0].isalnum() or t[0] == "_" or t in "*,;[]"):
            return -1
        last = t
        j += 1
    if j < limit and last == ";":
        return j
    return -1


def find_definitions(source: str) -> list[tuple[str, tuple[int, int]]]:
    """Function definitions at file scope as (name, (body_start, body_end)).

    ``source`` must already be noise-stripped.  The body span covers the
    braces themselves: ``source[start:end]`` begins with ``{`` and ends
    with ``}``.
    """
    tokens = [(m.group(), m.start()) for m in _TOKEN.finditer(source)]
    defs = []
    depth = 0
    k = 0
    while k < len(tokens):
        t, pos = tokens[k]
        if t == "{":
            depth += 1
        elif t == "}":
            depth -= 1
            if depth < 0:
                raise UnbalancedError("unmatched '}'", line=_position(source, pos)[0])
        elif (
            depth == 0
            and (t[0].isalpha() or t[0] == "_")
            and t not in KEYWORDS
            and k + 1 < len(tokens)
            and tokens[k + 1][0] == "("
        ):
            close = _match(tokens, k + 1, "(", ")")
            if close < 0:
                raise UnbalancedError("unmatched '('", line=_position(source, tokens[k + 1][1])[0])
            open_brace = _body_start(tokens, close + 1)
            if open_brace >= 0:
                end = _match(tokens, open_brace, "{", "}")
                if end < 0:
                    raise UnbalancedError("unmatched '{'", line=_position(source, tokens[open_brace][1])[0])
                defs.append((t, (tokens[open_brace][1], tokens[end][1] + 1)))
                k = end + 1
                continue
            k = close + 1
            continue
        k += 1
    if depth != 0:
        raise UnbalancedError("unmatched '{' at end of file")
    return defs


def find_calls(body: str) -> set[str]:
    """Names invoked as ``name(...)`` in a stripped body, minus keywords and member calls."""
    names = set()
    for m in _CALL.finditer(body):
        name = m.group()
        if name in KEYWORDS:
            continue
        j = m.start() - 1
        while j >= 0 and body[j].isspace():
            j -= 1
        if j >= 0 and (body[j] == "." or body[j - 1 : j + 1] == "->"):
            continue
        names.add(name)
    return names


def scan_file(path: str) -> tuple[str, list[tuple[str, set[str]]] | None, str | None]:
    """Lex one file.  Returns (path, [(name, callees)], None) or (path, None, reason)."""
    try:
        with open(path, encoding="latin-1") as fh:
            text = fh.read()
    except OSError as exc:
        return path, None, f"unreadable: {exc.strerror or exc}"
    try:
        stripped = strip_noise(text)
        defs = find_definitions(stripped)
    except (LexError, ParseError) as exc:
        return path, None, str(exc)
    return path, [(name, find_calls(stripped[a + 1 : b - 1])) for name, (a, b) in defs], None


def _source_files(root: Path, extensions) -> list[str]:
    found = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for fn in sorted(filenames):
            if fn.endswith(tuple(extensions)):
                found.append(os.path.join(dirpath, fn))
    return sorted(found)


def extract_pcn(root, options: ExtractOptions | None = None) -> tuple[DirectedGraph, ExtractionReport]:
    """Build the caller -> callee network of every function defined under root."""
    options = options or ExtractOptions()
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"source root {root} is not a directory")
    files = _source_files(root, options.extensions)
    report = ExtractionReport(n_files=len(files))

    if options.workers > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=options.workers) as pool:
            results = list(pool.map(scan_file, files, chunksize=16))
    else:
        results = [scan_file(f) for f in files]

    calls: dict[str, set[str]] = {}
    definitions: dict[str, int] = {}
    for path, defs, reason in results:
        if defs is None:
            report.skipped_files.append((os.path.relpath(path, root), reason))
            continue
        for name, callees in defs:
            calls.setdefault(name, set()).update(callees)
            definitions[name] = definitions.get(name, 0) + 1

    if not calls:
        raise EmptyGraphError(f"no functions found under {root}")
    names = sorted(calls)
    index = {name: i for i, name in enumerate(names)}
    edges = []
    unresolved = set()
    for caller in names:
        for callee in calls[caller]:
            if callee in index:
                edges.append((index[caller], index[callee]))
            else:
                unresolved.add(callee)
    g = DirectedGraph.from_edges(len(names), edges, names)
    report.n_procedures = g.n_nodes
    report.n_calls = g.n_edges
    report.unresolved_call_names = len(unresolved)
    report.multiply_defined = sum(1 for c in definitions.values() if c > 1)
    return g, report
