"""DIMACS CNF reading and writing."""

from __future__ import annotations

from typing import Iterable, Sequence


class DimacsError(ValueError):
    pass


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    """Parse DIMACS CNF text into ``(num_vars, clauses)``.

    Comment lines (``c``) and ``%`` terminators are ignored. Clauses may span
    lines; each is terminated by ``0``, though a trailing unterminated clause
    is accepted. The declared clause count is not enforced since many
    generators get it wrong.
    """
    nvars = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad problem line {line!r}")
            try:
                nvars, _ = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: bad problem line {line!r}") from None
            continue
        if nvars is None:
            raise DimacsError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if abs(lit) > nvars:
                    raise DimacsError(f"line {lineno}: literal {lit} exceeds {nvars} variables")
                current.append(lit)
    if current:
        clauses.append(current)
    if nvars is None:
        raise DimacsError("missing problem line")
    return nvars, clauses


def write_dimacs(nvars: int, clauses: Sequence[Iterable[int]], comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    clauses = [list(c) for c in clauses]
    lines.append(f"p cnf {nvars} {len(clauses)}")
    lines.extend(" ".join(map(str, c + [0])) for c in clauses)
    return "\n".join(lines) + "\n"


def load_into(solver, nvars: int, clauses: Iterable[Iterable[int]]) -> None:
    """Allocate ``nvars`` variables in ``solver`` and add ``clauses``."""
    while solver.nvars < nvars:
        solver.new_var()
    solver.add_clauses(clauses)
