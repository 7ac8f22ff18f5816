""" exception.py -- define clustering engine exceptions

  Language: Python 3

  + 10/18/26: Created, following the scripting exception layout.
  + 10/18/26: Add ContractViolation for operation preconditions.

"""

# base class for all engine errors
class FascError(Exception):
    def __init__(self, value):
        self.value = value
    def __str__(self):
        return str(self.value)

# exception class for invalid configuration or command-line values
class ConfigError(FascError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(message)
    def __str__(self):
        return "{}: {}".format(self.field, self.value)

# exception class for malformed input data
class DataError(FascError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message)
    def __str__(self):
        if self.line is None:
            return str(self.value)
        return "{} at line {:d}".format(self.value, self.line)

# exception class for violated operation preconditions
class ContractViolation(FascError):
    pass

# exception class for failed runtime invariant checks
class InvariantViolation(FascError):
    def __init__(self, invariant, detail):
        self.invariant = invariant
        super().__init__(detail)
    def __str__(self):
        return "invariant {} violated: {}".format(self.invariant, self.value)
