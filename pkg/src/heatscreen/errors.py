"""Exception hierarchy.

Every error carries the CLI exit code of its class: 2 for I/O and file-format
problems, 3 for validation failures, 4 for numerical failures.
"""


class HeatScreenError(Exception):
    exit_code = 1


class IoFailure(HeatScreenError):
    exit_code = 2


class BadMagic(IoFailure):
    pass


class UnsupportedVersion(IoFailure):
    pass


class TruncatedPayload(IoFailure):
    pass


class ValidationError(HeatScreenError):
    exit_code = 3


class InvalidField(ValidationError):
    pass


class OutOfRangeValue(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class LegendMissingCode(ValidationError):
    pass


class NegativePopulation(ValidationError):
    pass


class WrongStep(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class NumericError(HeatScreenError):
    exit_code = 4


class ZeroPeak(NumericError):
    pass


class ZeroDemand(NumericError):
    pass


class ZeroPopulation(NumericError):
    pass


class AllMissingCell(NumericError):
    pass


class EmptySeries(NumericError):
    pass
