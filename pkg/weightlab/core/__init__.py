from .runnable import Runnable
from .serializable import JSONSerializable
from .utils import (
    DomainError,
    InfeasibleError,
    JSONParseError,
    PropertyCheckError,
    register_class,
)

__all__ = [
    'DomainError',
    'InfeasibleError',
    'JSONParseError',
    'JSONSerializable',
    'PropertyCheckError',
    'Runnable',
    'register_class',
]
