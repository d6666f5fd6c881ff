"""Run ``python -m squeeze_tools <scenario> ...``."""

from __future__ import annotations

import logging
import sys
from typing import Optional, Sequence

from .cli import app


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    app.logger.setLevel(logging.INFO)
    return app(argv)


if __name__ == "__main__":
    sys.exit(main())
