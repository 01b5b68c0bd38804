from __future__ import annotations

import json
import logging
import sys
from typing import Any

from plyforge.drawings import Drawing
from plyforge.exceptions import InputError, ValidationError
from plyforge.lowerbound import LowerBoundInstance
from plyforge.trees import RootedTree

logger = logging.getLogger(__name__)


def read_json(path: str) -> Any:
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f'{path}: malformed JSON ({e})')
    except OSError as e:
        raise InputError(f'{path}: cannot read ({e.strerror})')


def write_text(text: str, path: str | None = None) -> None:
    """Writes to path, or to stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
        if not text.endswith('\n'):
            sys.stdout.write('\n')
        return
    try:
        with open(path, 'w') as f:
            f.write(text)
    except OSError as e:
        raise InputError(f'{path}: cannot write ({e.strerror})')
    logger.info(f'wrote {path}')


def write_json(data: Any, path: str | None = None) -> None:
    write_text(json.dumps(data, indent=4), path)


def load_tree(path: str) -> RootedTree:
    return RootedTree.from_json(read_json(path))


def load_drawing(path: str) -> Drawing:
    return Drawing.from_json(read_json(path))


def load_instance(path: str) -> LowerBoundInstance:
    data = read_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f'{path}: expected a JSON object')
    return LowerBoundInstance.from_json(data)
