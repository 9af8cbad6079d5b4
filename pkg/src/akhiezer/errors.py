"""Exception hierarchy shared by both pipelines."""

from __future__ import annotations


class AkhiezerError(RuntimeError):
    """Base class for numerical failures raised by the library."""


class ConfigError(ValueError):
    """Raised when a run configuration cannot be loaded or validated."""


# geometry


class GeometryError(AkhiezerError, ValueError):
    """Raised when endpoint lists do not describe a valid interval set."""


class InterlacingViolation(GeometryError):
    """Raised when endpoints are not strictly interlaced."""


class ArityMismatch(GeometryError):
    """Raised when len(betas) != len(alphas) + 2."""


class DegenerateEndpoint(GeometryError):
    """Raised when two endpoints are closer than the gap tolerance."""


class OutsideSupport(AkhiezerError, ValueError):
    """Raised when a band-only quantity is requested off the bands."""


class OnCut(AkhiezerError, ValueError):
    """Raised when an off-cut quantity is requested on (or next to) a band."""


# quadrature / opoly


class NonFiniteSample(AkhiezerError):
    """Raised when an integrand produces NaN or inf at a quadrature node."""


class LossOfPositivity(AkhiezerError):
    """Raised when a computed norm h_n is not strictly positive."""


class IllConditioned(AkhiezerError):
    """Raised when a determinant route cannot deliver the requested accuracy."""


# deformation checks


class StepTooLarge(AkhiezerError):
    """Raised when a finite-difference residual fails to shrink with the step."""


class GeometryBroken(AkhiezerError):
    """Raised when a perturbed endpoint set is no longer valid."""


# surface / theta


class SingularPeriodMatrix(AkhiezerError):
    """Raised when the a-period matrix is numerically singular."""


class PathDegenerate(AkhiezerError, ValueError):
    """Raised when an Abelian integral is requested at a branch point it cannot reach."""


class RadiusInsufficient(AkhiezerError):
    """Raised when the certified theta truncation does not cover an argument."""


class NearThetaDivisor(AkhiezerError):
    """Raised when a theta ratio is evaluated too close to a zero of theta."""
