"""
Exceptions raised while building or validating event networks.
"""


class NetworkError(ValueError):
    """Base class for network construction errors."""


class InvalidSchema(NetworkError):
    """Duplicate commodity names or unit masses outside their allowed range."""


class UnknownNode(NetworkError):
    def __init__(self, node, context=''):
        self.node = node
        super().__init__(f"Unknown node '{node}'{context}")


class UnknownVehicle(NetworkError):
    def __init__(self, vehicle, context=''):
        self.vehicle = vehicle
        super().__init__(f"Unknown vehicle '{vehicle}'{context}: not a discrete commodity of the schema")


class UnknownCommodity(NetworkError):
    def __init__(self, commodity, context=''):
        self.commodity = commodity
        super().__init__(f"Unknown commodity '{commodity}'{context}")


class CyclicLayer(NetworkError):
    """Active arcs of one event layer form a directed cycle."""

    def __init__(self, event, cycle=None):
        self.event = event
        self.cycle = cycle or []
        path = ' -> '.join(str(u) for u, _ in self.cycle) if self.cycle else ''
        super().__init__(f"Event layer {event} contains a directed cycle" + (f": {path}" if path else ''))


class DuplicateArc(NetworkError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"Duplicate transport arc {tuple(key)}")


class VehicleNotAllowedInLayer(NetworkError):
    def __init__(self, vehicle, event, tag):
        self.vehicle = vehicle
        self.event = event
        self.tag = tag
        super().__init__(f"Vehicle '{vehicle}' is not allowed in {tag} layer {event}")
