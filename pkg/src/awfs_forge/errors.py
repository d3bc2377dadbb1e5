"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for all errors raised by awfs_forge."""


class MalformedInput(ForgeError):
    """Input data references undeclared ids or is structurally unusable."""


class CompositionError(ForgeError):
    """Two arrows were composed whose endpoints do not match."""


class FunctorError(ForgeError):
    """A proposed groupoid map does not preserve the required structure."""


class NotCommuting(ForgeError):
    """A square or cone that was required to commute does not."""


class NotAPullback(ForgeError):
    """A square that was required to be cartesian is not."""


class BaseMismatch(ForgeError):
    """Data that must live over the same base (or codomain) does not."""


class CapExceeded(ForgeError):
    """A brute-force enumeration was asked to exceed its size cap."""


class LawViolation(ForgeError):
    """A (co)algebra, homotopy or deformation-retract equation failed.

    ``law`` names the failing equation and ``witness`` carries the first
    object or arrow at which the two sides differ.
    """

    def __init__(self, law: str, witness=None):
        self.law = law
        self.witness = witness
        super().__init__(f"{law} fails at {witness!r}")


class InstanceViolation(LawViolation):
    """An awfs instance supplied data that breaks its own laws."""


class FibrednessViolation(InstanceViolation):
    """A reindexing comparison is not an isomorphism, or is not natural."""


class AxiomUnavailable(ForgeError):
    """An instance lacks a structure functor required by a construction."""


class PreAmsViolation(ForgeError):
    """A pre-ams comparison fails to commute with the two factorizations."""
