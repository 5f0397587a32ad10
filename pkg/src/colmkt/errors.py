"""Exception hierarchy.

Input problems derive from :class:`MarketError` (a ``ValueError``); oracle
failures derive from :class:`OracleFailure` and signal an engine bug or a
broken mathematical identity on a concrete instance.
"""


class MarketError(ValueError):
    pass


class NonRefiningFiltration(MarketError):
    def __init__(self, agent, time):
        super().__init__(f"filtration of agent {agent!r} at t={time} does not refine t={time - 1}")
        self.agent, self.time = agent, time


class NonAdaptedAsset(MarketError):
    def __init__(self, agent, asset, time, block):
        super().__init__(
            f"asset {asset!r} is not constant on block {list(block)} of agent {agent!r} at t={time}"
        )
        self.agent, self.asset, self.time, self.block = agent, asset, time, block


class ZeroProbabilityAtom(MarketError):
    def __init__(self, atom):
        super().__init__(f"atom {atom!r} has non-positive probability")
        self.atom = atom


class MassNotOne(MarketError):
    def __init__(self, total):
        super().__init__(f"probabilities sum to {total}, expected 1")
        self.total = total


class UnknownAssetIndex(MarketError):
    def __init__(self, agent, index):
        super().__init__(f"agent {agent!r} references unknown asset index {index}")
        self.agent, self.index = agent, index


class EventNotMeasurable(MarketError):
    pass


class NotMeasurable(MarketError):
    """A random vector component is not constant on an agent's information block."""


class NoCommonPartition(MarketError):
    pass


class BlockKeyMismatch(MarketError):
    pass


class DimensionMismatch(ValueError):
    pass


class NotSquare(DimensionMismatch):
    pass


class DimensionLimitExceeded(RuntimeError):
    def __init__(self, n, limit):
        super().__init__(f"vertex enumeration over {n} variables exceeds limit {limit}")
        self.n, self.limit = n, limit


class PointNotStrictlyInterior(ValueError):
    pass


class InconsistentSystem(ValueError):
    """Linear system has no solution; ``certificate`` y has y.M = 0 and y.rhs != 0."""

    def __init__(self, certificate):
        super().__init__("linear system is inconsistent")
        self.certificate = certificate


class NotReplicable(Exception):
    """Claim is not collectively replicable; ``certificate`` is a left-kernel vector."""

    def __init__(self, certificate):
        super().__init__("claim is not collectively replicable")
        self.certificate = certificate


class CsfViolation(ValueError):
    def __init__(self, time, block, agent):
        super().__init__(f"self-financing identity fails for agent {agent} at t={time} on block {list(block)}")
        self.time, self.block, self.agent = time, block, agent


class NcaViolated(RuntimeError):
    pass


class NaViolated(RuntimeError):
    def __init__(self, agent):
        super().__init__(f"agent {agent} admits an arbitrage")
        self.agent = agent


class MeasureNotCollectiveMartingale(ValueError):
    pass


class OracleFailure(AssertionError):
    pass


class InternalInconsistency(OracleFailure):
    pass


class ImplicationViolated(OracleFailure):
    pass


class DecompositionViolated(OracleFailure):
    pass


class IffViolated(OracleFailure):
    pass


class EquivalenceViolated(OracleFailure):
    pass
