from __future__ import annotations

import importlib
import json
import logging

from ..core.runnable import Runnable
from ..core.utils import (
    JSONParseError,
    PropertyCheckError,
    package_contents,
    process_objects,
    remove_comments,
)

logger = logging.getLogger(__name__)


def create_intop_parser(subparsers):
    parser = subparsers.add_parser(
        'intop', help='run integral operator experiments from a JSON configuration'
    )
    parser.add_argument(
        '--config', required=True, help="""JSON configuration file"""
    )
    parser.add_argument(
        '--out', help="""output directory (overrides out_dir of the configuration)"""
    )
    parser.add_argument(
        '--seed', type=int, help="""seed (overrides seed of the configuration)"""
    )
    parser.add_argument(
        '--dry',
        action='store_true',
        help="""do not run anything, just parse""",
    )
    parser.set_defaults(func=run_intop)
    return parser


def load_configuration(file_name: str) -> list:
    try:
        with open(file_name) as fp:
            data = json.load(fp)
    except OSError as e:
        raise JSONParseError(f'cannot read {file_name}: {e.strerror}') from None
    except json.JSONDecodeError as e:
        raise JSONParseError(f'{file_name}: {e}') from None
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise JSONParseError(f'{file_name}: expected a list of objects')
    remove_comments(data)
    return data


def run_intop(arg) -> int:
    # register classes that do not require module specification
    for module in sorted(package_contents('weightlab')):
        importlib.import_module(module)

    data = load_configuration(arg.config)
    dic = {}
    failed = []
    for element in data:
        obj = process_objects(element, dic)
        if isinstance(obj, Runnable) and not arg.dry:
            if not obj.run(arg.out, arg.seed):
                failed.append(element['id'])
    if failed:
        raise PropertyCheckError(
            'chain', f'pointwise domination chain failed in {", ".join(failed)}'
        )
    return 0
