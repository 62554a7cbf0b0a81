"""Typed errors shared by all modules.

The CLI maps these onto exit codes: InputError and subclasses -> 2,
IndeterminateError -> 3, BranchingError -> 4.
"""


class PadicDendroError(Exception):
    """Base class for every error raised by this package."""


class InputError(PadicDendroError):
    """Invalid input data or arguments."""


class FieldMismatchError(InputError):
    """Operands belong to different coefficient fields."""


class DuplicatePointError(InputError):
    """Points required to be pairwise distinct contain duplicates.

    Carries the duplicate groups so callers can route the configuration to
    ``moduli.collide`` instead.
    """

    def __init__(self, message: str, groups: list[list[str]] | None = None):
        super().__init__(message)
        self.groups = groups or []


class IndeterminateError(PadicDendroError):
    """A decision depends on digits lost to truncation.

    Raised instead of guessing whenever truncated operands agree on all of
    their shared known digits but the exact values may still differ.
    """


class BranchingError(PadicDendroError):
    """A cluster needs more child branches than the residue field offers.

    ``suggested_m`` is the smallest residue degree whose field is large
    enough for ``needed`` branches.
    """

    def __init__(self, needed: int, p: int, m: int):
        self.needed = needed
        self.p = p
        self.m = m
        suggested = 1
        while p**suggested < needed:
            suggested += 1
        self.suggested_m = suggested
        super().__init__(
            f"vertex needs {needed} branches but q = {p}^{m} = {p**m} allows "
            f"at most {p**m}; residue degree m >= {suggested} suffices"
        )
