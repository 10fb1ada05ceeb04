"""Exception hierarchy shared by every module."""


class BdscvError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpecError(BdscvError, ValueError):
    pass


class InvalidInputError(BdscvError, ValueError):
    pass


class InvalidKError(InvalidInputError):
    pass


class DegenerateProjectionError(BdscvError):
    """No variance direction exists in the feature matrix."""


class DataError(BdscvError):
    """Problem with an input data file (maps to CLI exit code 2)."""


class UnknownLabelColumnError(DataError, KeyError):
    pass


class UnknownDatasetError(DataError):
    pass


class FetchError(DataError):
    pass
