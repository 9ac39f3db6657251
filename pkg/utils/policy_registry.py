"""
Concurrency policy registry for the space logistics optimizer.
"""

import logging
from typing import Dict, Optional, Type

from milpcore.policies import BaseConcurrencyPolicy

logger = logging.getLogger(__name__)

# Global policy registry
_policy_registry: Dict[str, Type[BaseConcurrencyPolicy]] = {}


def register_policy(name: str, policy_class: Type[BaseConcurrencyPolicy]):
    """
    Register a policy class in the global registry.

    Args:
        name (str): Name to register the policy under
        policy_class (Type[BaseConcurrencyPolicy]): Policy class to register
    """
    if not issubclass(policy_class, BaseConcurrencyPolicy):
        raise ValueError(f"Policy class {policy_class.__name__} must inherit from BaseConcurrencyPolicy")

    _policy_registry[name] = policy_class
    logger.debug(f"Registered policy: {name} -> {policy_class.__name__}")


def get_policy(name: str, **kwargs) -> Optional[BaseConcurrencyPolicy]:
    """
    Get a policy instance by name.

    Args:
        name (str): Name of the policy to retrieve
        **kwargs: Arguments to pass to the policy constructor

    Returns:
        BaseConcurrencyPolicy: Instance of the requested policy, or None if not found
    """
    policy_class = _policy_registry.get(name)
    if policy_class is None:
        if not _policy_registry:
            auto_register_policies()
            policy_class = _policy_registry.get(name)

        if policy_class is None:
            logger.error(f"Policy '{name}' not found in registry")
            return None

    try:
        return policy_class(**kwargs)
    except Exception as e:
        logger.error(f"Failed to create policy '{name}': {e}")
        return None


def list_policies() -> Dict[str, str]:
    """
    List all registered policies.

    Returns:
        Dict[str, str]: Dictionary of policy names to descriptions
    """
    if not _policy_registry:
        auto_register_policies()

    return {name: policy_class().get_description() for name, policy_class in _policy_registry.items()}


def auto_register_policies():
    """Register the built-in concurrency policies."""
    from milpcore.policies import (
        DroptankSizingPolicy,
        FuelCapacityPolicy,
        UpperStageSizingPolicy,
        ZeroFlowPolicy,
    )

    register_policy("zero_flow", ZeroFlowPolicy)
    register_policy("fuel_capacity", FuelCapacityPolicy)
    register_policy("upper_stage_sizing", UpperStageSizingPolicy)
    register_policy("droptank_sizing", DroptankSizingPolicy)

    logger.debug(f"Auto-registered {len(_policy_registry)} policies")
