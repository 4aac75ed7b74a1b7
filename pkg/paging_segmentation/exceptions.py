from resource_core.exceptions import ModelError


class InvalidPagingConfig(ModelError, ValueError):
    pass


class AddressOutOfRange(ModelError):
    pass


class TableIncomplete(ModelError):
    pass


class MisalignedFrames(ModelError):
    pass
