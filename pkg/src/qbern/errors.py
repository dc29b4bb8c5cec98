"""
Exceptions raised by qbern. All of them derive from `QBernError` so that
callers can catch everything the library raises on purpose with a single
clause.
"""

class QBernError(Exception):
    pass

class RationalFormatError(QBernError, ValueError):
    pass

class InvalidQ(QBernError, ValueError):
    pass

class ZeroConstantTerm(QBernError, ValueError):
    pass

class DimensionMismatch(QBernError, ValueError):
    pass

class SingularMatrix(QBernError, ValueError):
    pass

class QEqualsOne(QBernError, ValueError):
    pass

class InvalidOrder(QBernError, ValueError):
    pass

class InsufficientSequence(QBernError, ValueError):
    pass

class PoleAtSample(QBernError, ValueError):
    pass

class DomainError(QBernError, ValueError):
    pass

class UnknownIdentity(QBernError, LookupError):
    pass

class UnknownFunction(QBernError, LookupError):
    pass
