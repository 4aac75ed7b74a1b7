from resource_core.exceptions import ModelError


class InadmissiblePair(ModelError):
    pass


class DuplicateEntry(ModelError):
    pass


class RightSideTaken(ModelError):
    pass


class NotFound(ModelError):
    pass


class NamesExhausted(ModelError):
    pass
