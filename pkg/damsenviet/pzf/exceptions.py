from typing import (
    Any,
    Union,
    List,
    Dict,
)

__all__ = [
    "IllegalValueException",
    "DeserializeException",
    "InvariantViolationException",
]


class IllegalValueException(Exception):
    """Exceptions for encountering illegal argument values."""

    def __init__(
        self,
        message: str,
        value: Any,
    ):
        """Initializes an IllegalValueException.

        :param message: A message indicating an illegal argument.
        :type message: str
        :param value: the offending value
        :type value: Any
        """
        super().__init__(message)
        self.value = value


class DeserializeException(Exception):
    """Exceptions encountered while reading graphs, configs or records."""

    def __init__(
        self,
        message: str,
        payload: Union[
            int,
            float,
            str,
            None,
            Dict,
            List,
        ],
    ):
        """Initializes a DeserializeException.

        :param message: the error message
        :type message: str
        :param payload: the offending payload (a line, a json value)
        :type payload: Union[ int, float, str, None, Dict, List, ]
        """
        super().__init__(message)
        self.payload: Union[
            int,
            float,
            str,
            None,
            Dict,
            List,
        ] = payload


class InvariantViolationException(Exception):
    """Raised when a guaranteed property fails to hold on a computed result.

    The payload is the object that witnesses the failure, usually a report.
    """

    def __init__(self, message: str, payload: Any = None):
        super().__init__(message)
        self.payload = payload
