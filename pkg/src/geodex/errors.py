"""Exception hierarchy shared by every geodex module."""


class GeodexError(Exception):
    """Base class; ``exit_code`` is what the CLI returns when this escapes."""

    exit_code = 1


class BadParams(GeodexError, ValueError):
    exit_code = 2


class NotPrime(BadParams):
    pass


class Reducible(BadParams):
    pass


class BadArgs(BadParams):
    pass


class AmbientMismatch(BadParams):
    pass


class NotASquare(BadParams):
    pass


class UnsupportedCharacteristic(BadParams):
    pass


class NotOppositeMaximals(BadParams):
    pass


class NotBipartite(BadParams):
    pass


class NotAntipodal(BadParams):
    pass


class BadDistance(BadParams):
    pass


class BadFlag(BadParams):
    pass


class BadType(BadParams):
    pass


class NotDistinct(BadParams):
    pass


class NotSingular(BadParams):
    pass


class MaximalNotAllowed(BadParams):
    pass


class OppositeEnds(BadParams):
    pass


class NotAGeodesic(BadParams):
    pass


class NotPermutation(BadParams):
    pass


class NotDistanceRegular(GeodexError):
    pass


class Disconnected(GeodexError):
    pass


class DivisionByZero(GeodexError, ZeroDivisionError):
    pass


class TooLarge(GeodexError):
    exit_code = 3


class MalformedInput(GeodexError):
    exit_code = 4
