"""Bezout identities in k[G_Q]: gcds, certificates and lifts."""

from .gcd import (
    BezoutCertificate,
    DivisionStep,
    PreconditionError,
    SElement,
    division_step,
    gcd_pair,
    ideal_gcd,
    laurent_gcd,
)
from .laurent import LaurentPoly, from_laurent, to_laurent

__all__ = [
    "BezoutCertificate",
    "DivisionStep",
    "PreconditionError",
    "SElement",
    "division_step",
    "gcd_pair",
    "ideal_gcd",
    "laurent_gcd",
    "LaurentPoly",
    "from_laurent",
    "to_laurent",
]

from .lift import (  # noqa: E402
    DegenerateRootError,
    LiftCertificate,
    LiftedElement,
    LiftError,
    bezout_lift,
    coprime_step,
)

__all__ += ["DegenerateRootError", "LiftCertificate", "LiftedElement", "LiftError", "bezout_lift", "coprime_step"]
