"""Built-in fixture definitions (booleans and small combinators)."""

from __future__ import annotations

import os
from pathlib import Path

from .parser import parse_prelude
from .terms import Term

BUILTIN_PRELUDE = """\
-- booleans
T = \\x y. x
F = \\x y. y
-- combinators
I = \\x. x
D = \\x. x x
W3 = \\x. x x x
XOR = \\a b. a (b F T) b
"""

PRELUDE_ENV = "LOP_PRELUDE"


def builtin() -> dict[str, Term]:
    return parse_prelude(BUILTIN_PRELUDE)


def load(path: str | os.PathLike | None = None, *, use_builtin: bool = True) -> dict[str, Term]:
    """Built-in definitions, then ``$LOP_PRELUDE``, then ``path``; later files override."""
    defs = builtin() if use_builtin else {}
    for source in (os.environ.get(PRELUDE_ENV), path):
        if source:
            # user files may refer to the built-in names
            prefix = BUILTIN_PRELUDE if use_builtin else ""
            defs.update(parse_prelude(prefix + Path(source).read_text(encoding="utf-8")))
    return defs
