"""Exception types shared across the library.

The CLI maps these onto exit codes: usage problems exit 4, integrity
problems exit 3, verification verdicts exit 2. Library code raises; only
the CLI decides process-level consequences.
"""


class ParameterError(ValueError):
    """Rejected construction parameters (non-prime modulus, bad sizes)."""


class UsageError(ValueError):
    """Caller broke an interface contract (arity, domain, mismatched groups)."""


class DecodeError(ValueError):
    """Malformed serialized input (element strings, records, proofs)."""


class IntegrityError(RuntimeError):
    """Persistent state failed a tamper check (board chain, canonical bytes)."""


class WitnessError(ValueError):
    """Prover was handed a witness the relation checker rejects."""


class BudgetError(RuntimeError):
    """A brute-force oracle would exceed its enumeration budget."""
