"""
Cislunar propellant-resupply campaign: configuration, model assembly, flow plans and Pareto sweeps.
"""

from cislunar.campaign import (
    NODES,
    CampaignBuilder,
    CampaignInstance,
    assemble_campaign,
    build_campaign,
    build_schema,
    load_registry,
)
from cislunar.campaign_config import CampaignConfig, SolverSettings
from cislunar.errors import CampaignError, ConfigError, PlanFormatError, UnmappableArc
from cislunar.plan import (
    ArcFlow,
    FlowPlan,
    PlanAudit,
    check_monotonicity,
    count_tug_uses,
    extract_plan,
    plan_to_frame,
    read_plan,
    read_plan_csv,
    read_plan_json,
    validate_plan,
    write_plan_csv,
    write_plan_json,
)
from cislunar.sweep import SweepPoint, baseline_bounds, pareto_sweep, rate_savings, solve_point
