"""Exception types shared across the package.

DataError covers anything the caller can fix (bad files, shape mismatches,
invalid options); NumericError covers failures inside the numerics (non-finite
objectives, impossible solves). The CLI maps them to exit codes 1 and 2.
"""


class S2netError(Exception):
    pass


class DataError(S2netError):
    pass


class NumericError(S2netError):
    pass
