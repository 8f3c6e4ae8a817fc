"""Bundled instance files (``*.ctx``), one per corpus context plus a few negative cases."""

from pathlib import Path

DIR = Path(__file__).parent


def path(name: str) -> Path:
    """Absolute path of a bundled file, e.g. ``path("e1.ctx")``."""
    p = DIR / name
    if not p.exists():
        raise FileNotFoundError(f"no bundled instance {name!r}; have {', '.join(sorted(x.name for x in DIR.glob('*.ctx')))}")
    return p
