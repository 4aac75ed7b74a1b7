from resource_core.exceptions import ModelError


class MissingPriority(ModelError):
    pass


class NotCurrent(ModelError):
    pass


class NoClosure(ModelError):
    pass
