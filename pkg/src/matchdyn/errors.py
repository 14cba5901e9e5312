"""Exception hierarchy shared by all matchdyn modules."""


class MatchdynError(Exception):
    """Base class for all errors raised by matchdyn."""


class DomainError(MatchdynError):
    """A coordinate tuple is not a valid element of its group or chart."""


class TagError(MatchdynError):
    """Vectors from mismatched groups or dual spaces were combined."""


class EvaluationError(MatchdynError):
    """A user-supplied function returned a non-finite value."""

    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class SingularJacobian(MatchdynError):
    """Newton Jacobian is numerically singular (condition estimate > 1e14)."""


class NoConvergence(MatchdynError):
    """Newton iteration budget exhausted."""

    def __init__(self, msg, residual_norm=None):
        super().__init__(msg)
        self.residual_norm = residual_norm


class NotComposable(MatchdynError):
    """Two groupoid arrows do not satisfy beta(x) = alpha(y)."""

    def __init__(self, beta_x, alpha_y):
        super().__init__(
            "arrows not composable: beta(x)=%s, alpha(y)=%s" % (beta_x, alpha_y)
        )
        self.beta_x = beta_x
        self.alpha_y = alpha_y


class BasePointMismatch(MatchdynError):
    """An algebroid fiber element was used at the wrong base point."""


class MatchedAxiomError(MatchdynError):
    """A matched-pair compatibility condition failed."""

    def __init__(self, condition, violation):
        super().__init__(
            "matched-pair condition %s violated (max deviation %.3e)"
            % (condition, violation)
        )
        self.condition = condition
        self.violation = violation


class FormulaMismatch(MatchdynError):
    """Closed-form and generic assemblies of the same quantity disagree."""
