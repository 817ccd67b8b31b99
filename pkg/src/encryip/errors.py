"""Exception hierarchy. Everything raised on purpose derives from EncryIPError."""


class EncryIPError(Exception):
    pass


class SchemeError(EncryIPError):
    """Errors in the group or encryption layer."""


class NotInSubgroup(SchemeError):
    pass


class ParameterSearchFailed(SchemeError):
    pass


class TooManyKeys(SchemeError):
    pass


class KeySpaceExhausted(SchemeError):
    pass


class DegenerateFake(SchemeError):
    pass


class CodecError(EncryIPError):
    pass


class LabelOutOfRange(CodecError):
    pass


class BadLength(CodecError):
    pass


class DataError(EncryIPError):
    pass


class TooManyClasses(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class UnknownRecord(EncryIPError):
    pass
