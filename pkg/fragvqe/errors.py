"""Exception hierarchy for fragvqe.

Every error builds its message from structured fields so callers can inspect
the offending value without parsing text.
"""

from pathlib import Path


class FragVqeError(Exception):
    """Base class for all fragvqe errors."""


class UnsupportedElementError(FragVqeError):
    """An element has no s-shell-only STO-3G parameterization."""

    def __init__(self, symbol: str) -> None:
        """Initialize with the offending element symbol."""
        self.symbol = symbol
        super().__init__(
            f"Element {symbol!r} needs p or higher shells; "
            "ingest its integrals from an FCIDUMP file instead",
        )


class InvalidGeometryError(FragVqeError):
    """A geometry violates a structural invariant."""

    def __init__(self, reason: str) -> None:
        """Initialize with a description of the violated invariant."""
        self.reason = reason
        super().__init__(f"Invalid geometry: {reason}")


class UnsupportedMultiplicityError(FragVqeError):
    """Only closed-shell singlets are supported."""

    def __init__(self, multiplicity: int, n_electrons: int) -> None:
        """Initialize with the requested multiplicity and electron count."""
        self.multiplicity = multiplicity
        self.n_electrons = n_electrons
        super().__init__(
            f"Restricted Hartree-Fock needs a singlet with an even electron "
            f"count; got multiplicity {multiplicity} with {n_electrons} electrons",
        )


class ScfNotConvergedError(FragVqeError):
    """The SCF iteration did not reach its thresholds."""

    def __init__(self, n_iterations: int, delta_e: float, delta_d: float) -> None:
        """Initialize with the final iteration count and residuals."""
        self.n_iterations = n_iterations
        self.delta_e = delta_e
        self.delta_d = delta_d
        super().__init__(
            f"SCF not converged after {n_iterations} iterations "
            f"(|dE|={delta_e:.3e}, rms dD={delta_d:.3e})",
        )


class InvalidActiveWindowError(FragVqeError):
    """An active-orbital window is inconsistent with the reference determinant."""

    def __init__(self, reason: str) -> None:
        """Initialize with a description of the inconsistency."""
        self.reason = reason
        super().__init__(f"Invalid active window: {reason}")


class FcidumpParseError(FragVqeError):
    """An FCIDUMP file could not be parsed."""

    def __init__(self, path: Path | str, line: int, reason: str) -> None:
        """Initialize with the file, 1-based line number and reason."""
        self.path = Path(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}:{line}: {reason}")


class SymmetryViolationError(FragVqeError):
    """Symmetry-equivalent integral records disagree."""

    def __init__(self, indices: tuple[int, ...], first: float, second: float) -> None:
        """Initialize with the 1-based indices and the two conflicting values."""
        self.indices = indices
        self.first = first
        self.second = second
        super().__init__(
            f"Integral {indices} given as {first!r} and {second!r}",
        )


class NotAntiHermitianError(FragVqeError):
    """A generator passed to an exponential is not anti-Hermitian."""

    def __init__(self, residual: float) -> None:
        """Initialize with the largest real coefficient part found."""
        self.residual = residual
        super().__init__(
            f"Generator is not anti-Hermitian (largest real part {residual:.3e})",
        )


class DimensionTooLargeError(FragVqeError):
    """A problem exceeds the dense simulation limit."""

    def __init__(self, n_qubits: int, limit: int) -> None:
        """Initialize with the requested and allowed qubit counts."""
        self.n_qubits = n_qubits
        self.limit = limit
        super().__init__(f"{n_qubits} qubits exceeds the limit of {limit}")


class AdaptPoolEmptyError(FragVqeError):
    """ADAPT was started with no operators to select from."""

    def __init__(self, kind: str) -> None:
        """Initialize with the pool kind."""
        self.kind = kind
        super().__init__(f"Operator pool {kind!r} is empty")


class OptimizerStalledError(FragVqeError):
    """The parameter optimizer stopped without meeting its tolerance."""

    def __init__(self, message: str, gradient_norm: float) -> None:
        """Initialize with the optimizer message and final gradient norm."""
        self.gradient_norm = gradient_norm
        super().__init__(f"Optimizer stalled: {message} (|g|inf={gradient_norm:.3e})")


class DegenerateBondError(FragVqeError):
    """A severed bond has coincident endpoints."""

    def __init__(self, atoms: tuple[int, int], length: float) -> None:
        """Initialize with the bond's atom pair and its length in angstrom."""
        self.atoms = atoms
        self.length = length
        super().__init__(f"Bond {atoms} is degenerate (length {length:.3e} A)")


class MissingSubproblemError(FragVqeError):
    """An MBE assembly needs a subset energy that was not supplied."""

    def __init__(self, fragments: tuple[int, ...]) -> None:
        """Initialize with the missing fragment set."""
        self.fragments = fragments
        super().__init__(f"No energy for fragment set {fragments}")


class PlanError(FragVqeError):
    """A fragmentation plan is inconsistent with its geometry."""

    def __init__(self, reason: str) -> None:
        """Initialize with a description of the inconsistency."""
        self.reason = reason
        super().__init__(f"Invalid fragmentation plan: {reason}")


class IllConditionedOverlapError(FragVqeError):
    """The AO overlap matrix is too close to singular to orthogonalize."""

    def __init__(self, smallest_eigenvalue: float) -> None:
        """Initialize with the smallest overlap eigenvalue."""
        self.smallest_eigenvalue = smallest_eigenvalue
        super().__init__(
            f"Overlap matrix is ill-conditioned (smallest eigenvalue "
            f"{smallest_eigenvalue:.3e})",
        )


class EmbeddingError(FragVqeError):
    """An embedding problem could not be constructed."""

    def __init__(self, fragment: int, reason: str) -> None:
        """Initialize with the fragment id and reason."""
        self.fragment = fragment
        self.reason = reason
        super().__init__(f"Fragment {fragment}: {reason}")


class DmetNotConvergedError(FragVqeError):
    """The DMET outer loop did not reach its cost tolerance."""

    def __init__(self, n_iterations: int, cost: float) -> None:
        """Initialize with the iteration count and final cost."""
        self.n_iterations = n_iterations
        self.cost = cost
        super().__init__(
            f"DMET not converged after {n_iterations} iterations (cost {cost:.3e})",
        )


class ConfigError(FragVqeError):
    """A run configuration is invalid."""

    def __init__(self, message: str, field: str) -> None:
        """Initialize with a message and the dotted name of the offending field."""
        self.message = message
        self.field = field
        super().__init__(f"{field}: {message}")


class InvalidElectronCountError(FragVqeError):
    """A closed-shell calculation was asked for an impossible electron count."""

    def __init__(self, n_electrons: int, n_orbitals: int) -> None:
        """Initialize with the electron count and the number of spatial orbitals."""
        self.n_electrons = n_electrons
        self.n_orbitals = n_orbitals
        super().__init__(
            f"Closed-shell calculation needs an even electron count between 0 and "
            f"{2 * n_orbitals}; got {n_electrons}",
        )
