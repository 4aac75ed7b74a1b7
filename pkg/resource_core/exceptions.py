class ModelError(Exception):
    """Base class for every failure raised by the OS model.

    ``phase`` is filled in by the workload runner so the CLI can say where a
    run stopped (paging, allocation, scheduling).
    """

    phase = None

    def __init__(self, message='', **context):
        super().__init__(message)
        self.context = context

    def with_phase(self, phase):
        self.phase = phase
        return self


class UniverseTooSmall(ModelError):
    pass


class MissingKey(ModelError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class IndexOutOfRange(ModelError, IndexError):
    pass


class InvalidRegion(ModelError, ValueError):
    pass


class Exhausted(ModelError):
    """No free run of the requested size exists in a finite pool."""


class NoContiguousRun(Exhausted):
    """Enough free elements in total, but fragmented."""


class SpanNotFree(ModelError):
    pass


class SpanOutOfBounds(ModelError):
    pass


class ConsumableResource(ModelError):
    pass


class UnknownBinding(ModelError):
    pass
