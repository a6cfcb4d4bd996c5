"""Exception types shared across the simulator."""


class CrowdnetError(Exception):
    pass


class InputError(CrowdnetError, ValueError):
    """Malformed arguments: wrong shapes, non-finite values, mismatched weights."""


class DegenerateGeometryError(CrowdnetError, ValueError):
    """A direction was requested between two coincident points."""


class GeometryError(CrowdnetError, ValueError):
    """A point that must lie inside the corridor does not."""


class DomainError(CrowdnetError, ValueError):
    """An x-coordinate falls outside the corridor's x-domain."""


class ConfigError(CrowdnetError, ValueError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        self.message = message
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class SimulationError(CrowdnetError, RuntimeError):
    """Raised by the engine when a module error aborts a run."""

    def __init__(self, message, agent=None, iteration=None):
        self.agent = agent
        self.iteration = iteration
        super().__init__(f"iteration {iteration}, agent {agent}: {message}")
