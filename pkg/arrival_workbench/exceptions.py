class ArrivalException(Exception):
    pass


class InvalidInstanceException(ArrivalException):
    pass


class ParseException(InvalidInstanceException):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class NonTerminatingException(ArrivalException):
    pass


class StepCapExceededException(ArrivalException):
    def __init__(self, step_cap):
        self.step_cap = step_cap
        super().__init__(f"run did not reach a destination within {step_cap} steps")


class DimensionMismatchException(ArrivalException):
    pass


class SchedulerException(ArrivalException):
    pass


class MonotonicityViolationException(ArrivalException):
    def __init__(self, message, witness=None):
        self.witness = witness
        if witness is not None:
            (p, dp), (q, dq) = witness
            message = f"{message}: {p} <= {q} but D{p} = {dp} is not <= D{q} = {dq}"
        super().__init__(message)


class LatticeTooLargeException(ArrivalException):
    pass


class CertificateException(ArrivalException):
    pass


class DisagreementException(ArrivalException):
    def __init__(self, message, certificates=None):
        self.certificates = certificates or {}
        super().__init__(message)


class NoFeedbackVertexSetException(ArrivalException):
    def __init__(self, k_max):
        self.k_max = k_max
        super().__init__(f"no feedback vertex set of size <= {k_max}")


class InvalidCertificateException(ArrivalException):
    def __init__(self, verdict):
        self.verdict = verdict
        super().__init__(str(verdict))
