from resource_core.exceptions import ModelError


class WorkloadError(ModelError):
    def __init__(self, message='', line=None, **context):
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message, **context)


class ParseError(WorkloadError):
    pass


class ValidationError(WorkloadError):
    pass


class AuditFailure(ModelError):
    pass
