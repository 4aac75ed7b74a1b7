from resource_core.exceptions import ModelError


class InvalidProcedure(ModelError, ValueError):
    pass


class InvalidPolicy(ModelError, ValueError):
    pass


class ShrinkBelowZero(ModelError):
    pass


class NotBound(ModelError):
    pass
