"""Exception hierarchy for geometric degeneracies and failed preconditions."""


class GeometryError(Exception):
    """Base class for all geometric errors raised by this package."""


class IsotropicVector(GeometryError):
    """The vector has (numerically) vanishing self-product and spans no point."""


class SamePoint(GeometryError):
    """Two points expected to be distinct coincide projectively."""


class EqualPoints(SamePoint):
    """A pair of equal points where a genuine pair is required."""


class OrthogonalPoints(GeometryError):
    """The points are orthogonal, so no bending through them exists."""


class DegenerateTau(GeometryError):
    """The shape invariant is undefined because a needed product vanishes."""


class EuclideanLine(GeometryError):
    """The projective line is euclidean and has no polar point."""


class EuclideanGeodesic(GeometryError):
    """The geodesic is euclidean and carries no orthogonal partners."""


class NotOnGeodesic(GeometryError):
    """The point does not lie on the given geodesic."""


class IncompatibleInertia(GeometryError):
    """The hermitian matrix cannot be realized in signature (+, +, -)."""


class ZeroDiagonal(GeometryError):
    """A Gram matrix diagonal entry vanishes where a nonzero one is needed."""


class NotRegular(GeometryError):
    """The isometry has an eigenvalue with geometric multiplicity above one."""


class NotConjugate(GeometryError):
    """No conjugator exists (or none was found) between the two isometries."""


class NotTwoReflectionProduct(GeometryError):
    """The isometry is not a product of two reflections in negative points."""


class SignChange(GeometryError):
    """Consecutive path samples have different signs."""


class StepTooLarge(GeometryError):
    """Adjacent path samples are too far apart to resolve the lift."""


class ExceptionalCase(GeometryError):
    """A configuration for which no bending can repair the line type."""


class NotStronglyRegular(GeometryError):
    """The triple fails the strong regularity requirements."""


class InadmissibleCoords(GeometryError):
    """The requested surface coordinates violate the defining constraints."""


class TraceMinusOne(GeometryError):
    """The isometry has trace -1 and no three-reflection decomposition."""


class Unreachable(GeometryError):
    """The target value lies below the minimum of the bending profile."""


class OnRamification(GeometryError):
    """The configuration sits on the ramification locus, so the map folds."""


class LeavesAdmissibleRegion(GeometryError):
    """A requested move exits the admissible coordinate region."""


class IncompatibleInvariants(GeometryError):
    """The two configurations have different connected-component invariants."""


class NotAPentagon(GeometryError):
    """The five points do not satisfy the pentagon relation."""


class InadmissibleModuli(GeometryError):
    """The pentagon moduli violate the defining equation or inequalities."""


class DifferentDelta(GeometryError):
    """The pentagons have different central cube roots."""


class RankInconclusive(GeometryError):
    """The numerical rank of the holonomy sample could not be resolved."""
