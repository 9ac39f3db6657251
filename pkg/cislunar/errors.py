"""
Campaign-level errors.
"""


class CampaignError(ValueError):
    """Base class for case-study campaign errors."""


class ConfigError(CampaignError):
    """Campaign configuration is malformed or inconsistent."""


class PlanFormatError(CampaignError):
    """FlowPlan JSON/CSV does not follow the documented schema."""


class UnmappableArc(CampaignError):
    """A plan row names an arc the campaign network does not contain."""

    def __init__(self, description: str, reason: str = 'no matching arc'):
        self.description = description
        super().__init__(f"Cannot map plan arc {description}: {reason}")
