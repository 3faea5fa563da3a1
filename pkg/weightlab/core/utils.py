import importlib
import logging
import math
import numbers
import os
from pathlib import Path
from typing import Union

import torch

REGISTERED_CLASSES = {}

DTYPE = torch.float64

RELATIVE_TOLERANCE = 1e-9

SANDWICH_TOLERANCE = 1e-7

CERTIFICATE_TOLERANCE = 1e-12

MIN_EXPONENT = 1.0

MAX_EXPONENT = 100.0


class JSONParseError(Exception):
    ...


class DomainError(ValueError):
    """Raised when an operation is called outside its domain."""


class InfeasibleError(DomainError):
    ...


class PropertyCheckError(Exception):
    """Raised when a checked inequality or identity fails.

    :param str item: name of the failing check
    :param str message: description of the violation
    """

    def __init__(self, item: str, message: str = '') -> None:
        self.item = item
        super().__init__(f'{item}: {message}' if message else item)


class DivergenceError(PropertyCheckError):
    ...


def get_class(full_name: str) -> type:
    if full_name in REGISTERED_CLASSES:
        return REGISTERED_CLASSES[full_name]

    a = full_name.split('.')
    class_name = a[-1]
    module_name = '.'.join(a[:-1])
    if module_name == '':
        raise ValueError(f'Unknown type `{full_name}\'')
    module = importlib.import_module(module_name)
    return getattr(module, class_name)


def register_class(_cls, name=None):
    logging.debug('register_class: {}'.format(_cls))
    if name is not None:
        REGISTERED_CLASSES[name] = _cls
    else:
        REGISTERED_CLASSES[_cls.__name__] = _cls
    return _cls


def process_objects(data, dic, force_list=False, key=None):
    if key is not None and key not in data:
        return [] if force_list else None
    elif key is not None and key in data:
        data = data[key]

    if isinstance(data, list):
        return [process_object(obj, dic) for obj in data]
    obj = process_object(data, dic)
    return [obj] if force_list else obj


def process_object(data, dic):
    """Build an object from its dictionary representation or look up a
    reference.

    A string is the ID of an object that was built earlier; a dictionary must
    carry ``id`` and ``type`` keys and is dispatched to the ``from_json_safe``
    method of the registered class.
    """
    if isinstance(data, str):
        try:
            return dic[data]
        except KeyError:
            raise JSONParseError(f"Object with ID `{data}' not found") from None
    elif not isinstance(data, dict):
        raise JSONParseError(
            'Object is not valid (should be str or object)\nProvided: {}'.format(data)
        )

    if 'id' not in data:
        if 'type' in data:
            raise JSONParseError(
                f"Missing `id' key for object of type `{data['type']}'"
            )
        raise JSONParseError("Missing `id' and `type' keys")
    id_ = data['id']
    if id_ in dic:
        raise JSONParseError(f"Object with ID `{id_}' already exists")
    if 'type' not in data:
        raise JSONParseError(f"Object with ID `{id_}' does not have a type")

    try:
        klass = get_class(data['type'])
    except (ModuleNotFoundError, AttributeError, ValueError) as e:
        raise JSONParseError(str(e) + f" in object with ID `{id_}'") from None

    obj = klass.from_json_safe(data, dic)
    dic[id_] = obj
    return obj


def validate(data, rules):
    """Check the keys and value types of a JSON object against a rule table.

    Each rule maps a key to a dictionary with a ``type`` entry (``|``-separated
    alternatives among string, bool, int, float, number, object, list) and the
    optional flags ``optional`` and ``list``.

    :example:
    >>> validate({'id': 'a', 'p': 2.0}, {'p': {'type': 'number'}})
    >>> validate({'id': 'a', 'r': 2.0}, {'p': {'type': 'number', 'optional': True}})
    Traceback (most recent call last):
    ...
    weightlab.core.utils.JSONParseError: Key not allowed: r
    """
    types = {
        'string': str,
        'bool': bool,
        'int': int,
        'float': float,
        'number': numbers.Number,
        'object': dict,
        'list': list,
    }

    for rule_key, rule in rules.items():
        if rule_key not in data and not rule.get('optional', False):
            raise JSONParseError('Missing key: {}'.format(rule_key))

    for datum_key, value in data.items():
        if datum_key in ('id', 'type'):
            continue
        if datum_key not in rules:
            raise JSONParseError('Key not allowed: {}'.format(datum_key))
        allowed = tuple(types[t] for t in rules[datum_key]['type'].split('|'))
        if rules[datum_key].get('list', False):
            valid = isinstance(value, list) and all(
                isinstance(x, allowed) for x in value
            )
        else:
            valid = isinstance(value, allowed)
        if not valid:
            raise JSONParseError(
                '\'{}\' has an invalid type: {}'.format(datum_key, value)
            )


def remove_comments(obj):
    """Remove comments in dictionary representation of objects.

    - A key starting with an underscore results in the key/value pair to be removed.
    - A dictionary with key equal to *ignore* and value set to *True* results in its
      removal.
    """
    if isinstance(obj, list):
        for i in range(len(obj) - 1, -1, -1):
            if isinstance(obj[i], dict) and obj[i].get('ignore', False):
                del obj[i]
            else:
                remove_comments(obj[i])
    elif isinstance(obj, dict):
        for key in list(obj.keys()):
            if key.startswith('_') or (
                isinstance(obj[key], dict) and obj[key].get('ignore', False)
            ):
                del obj[key]
            else:
                remove_comments(obj[key])


def package_contents(package_name):
    import importlib.util

    spec = importlib.util.find_spec(package_name)
    if spec is None or spec.origin is None:
        return set()

    pathname = Path(spec.origin).parent
    ret = set()
    with os.scandir(pathname) as entries:
        for entry in entries:
            if entry.name.startswith('_'):
                continue
            current = '.'.join((package_name, entry.name.partition('.')[0]))
            if entry.is_file():
                if entry.name.endswith('.py'):
                    ret.add(current)
            elif entry.is_dir():
                ret.add(current)
                ret |= package_contents(current)
    return ret


def make_generator(seed: int) -> torch.Generator:
    """Return a CPU generator seeded with ``seed``."""
    generator = torch.Generator()
    generator.manual_seed(int(seed))
    return generator


def check_exponent(
    value: float,
    name: str = 'p',
    low: float = MIN_EXPONENT,
    allow_inf: bool = False,
    inclusive: bool = False,
) -> float:
    """Validate an exponent and return it as a float.

    Finite exponents must lie in ``(low, MAX_EXPONENT]``, or in
    ``[low, MAX_EXPONENT]`` when ``inclusive`` is set.

    :example:
    >>> check_exponent(2)
    2.0
    >>> check_exponent(float('inf'), allow_inf=True)
    inf
    >>> check_exponent(1.0)
    Traceback (most recent call last):
    ...
    weightlab.core.utils.DomainError: p=1.0 is outside (1.0, 100.0]
    """
    value = float(value)
    if math.isinf(value) and value > 0:
        if allow_inf:
            return value
        raise DomainError(f'{name} must be finite')
    if inclusive and low <= value <= MAX_EXPONENT:
        return value
    if not (low < value <= MAX_EXPONENT):
        bracket = '[' if inclusive else '('
        raise DomainError(
            f'{name}={value} is outside {bracket}{low}, {MAX_EXPONENT}]'
        )
    return value


def conjugate(p: float) -> float:
    """Hölder conjugate exponent.

    :example:
    >>> conjugate(2.0)
    2.0
    >>> conjugate(3.0)
    1.5
    >>> conjugate(float('inf'))
    1.0
    """
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def relative_le(a: float, b: float, rtol: float = RELATIVE_TOLERANCE) -> bool:
    """Return ``a <= b`` up to a relative tolerance."""
    return a <= b + rtol * max(abs(a), abs(b), 1.0)


def as_tensor(values: Union[torch.Tensor, list, tuple]) -> torch.Tensor:
    if isinstance(values, torch.Tensor):
        return values.to(dtype=DTYPE)
    return torch.tensor(values, dtype=DTYPE)
