"""Interface for objects built from a JSON configuration."""

from __future__ import annotations

import abc
import logging
from typing import Any

from weightlab.core.utils import DomainError, JSONParseError


class JSONSerializable(abc.ABC):
    """Interface making an object configurable from JSON.

    Base class establishing the
    :meth:`~weightlab.core.serializable.JSONSerializable.from_json` abstract
    method.
    """

    @classmethod
    @abc.abstractmethod
    def from_json(cls, data: dict[str, Any], dic: dict[str, Any]) -> Any:
        """Abstract method to create object from a dictionary.

        :param dict[str, Any] data: dictionary representation of a weightlab object.
        :param dict[str, Any] dic: dictionary containing other weightlab objects
            keyed by their ID.
        :return: weightlab object.
        :rtype: Any
        """
        ...

    @classmethod
    def from_json_safe(cls, data: dict[str, Any], dic: dict[str, Any]) -> Any:
        """Parse dictionary to create object.

        Missing keys and violated preconditions are both reported as
        :class:`~weightlab.core.utils.JSONParseError` naming the object.

        :raises JSONParseError: JSON error
        """
        type_ = cls.__name__
        id_ = data.get('id')
        try:
            return cls.from_json(data, dic)
        except KeyError as e:
            key = e.args[0]
            if id_ is None:
                raise JSONParseError(
                    f"Missing `id' key for object of type `{type_}'"
                ) from None
            raise JSONParseError(
                f"Missing key `{key}' for object of type `{type_}' with ID `{id_}'"
            ) from None
        except DomainError as e:
            raise JSONParseError(
                f"Invalid value in object of type `{type_}' with ID `{id_}': {e}"
            ) from None
        except JSONParseError as e:
            logging.error(e)
            raise JSONParseError(
                f"Calling object of type `{type_}' with ID `{id_}'"
            ) from None
