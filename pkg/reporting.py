"""
reporting.py - Text-based reporting for campaign solves, sweeps and plan audits

Writes the solve report JSON, flow plans, the pareto CSV and markdown summaries
that list what a campaign launches, where tugs fly and how the cost compares.
"""

import json
import os
from datetime import datetime

import pandas as pd

from cislunar.plan import FlowPlan, count_tug_uses, write_plan_csv, write_plan_json
from simplexbb import write_report

PARETO_COLUMNS = ['T_cargo', 'T_crew', 'objective_kg', 'savings_pct', 'status', 'gap', 'nodes', 'tugs_used']
AUDIT_COLUMNS = ['constraint', 'tag', 'relation', 'lhs', 'rhs', 'residual', 'tolerance', 'violated']


def write_solve_outputs(instance, result, output_dir, plan=None):
    """
    Write solve_report.json and, when a solution exists, plan.json, plan.csv and summary.md.

    Args:
        instance: CampaignInstance that was solved
        result: SolveResult of the solve
        output_dir: Target directory
        plan: Extracted FlowPlan, if any

    Returns:
        dict: Artifact name -> path
    """
    os.makedirs(output_dir, exist_ok=True)
    paths = {'report': os.path.join(output_dir, 'solve_report.json')}
    write_report(result, paths['report'], instance.model.statistics())
    if plan is not None:
        paths['plan_json'], paths['plan_csv'] = write_plan_files(plan, output_dir, instance.schema.names)
    paths['summary'] = os.path.join(output_dir, 'summary.md')
    generate_campaign_summary(instance, result, plan, paths['summary'])
    return paths


def generate_campaign_summary(instance, result, plan, output_path):
    """
    Markdown summary of one campaign solve.

    Returns:
        Path to the generated report
    """
    campaign = instance.config
    with open(output_path, 'w') as f:
        f.write(f"# Campaign Report: {campaign.name}\n\n")
        f.write(f"Generated on: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n\n")

        f.write("## Summary\n\n")
        f.write("| Item | Value |\n")
        f.write("|------|-------|\n")
        f.write(f"| Status | {result.status} |\n")
        if result.has_solution:
            f.write(f"| IMLEO | {result.objective:,.0f} kg |\n")
        f.write(f"| Relative gap | {_fmt(result.gap, '.2e')} |\n")
        f.write(f"| Nodes | {result.nodes} |\n")
        f.write(f"| T_cargo bound | {_days(campaign.t_cargo_days)} |\n")
        f.write(f"| T_crew bound | {_days(campaign.t_crew_days)} |\n")
        f.write(f"| Crew missions | {campaign.missions} |\n")
        f.write(f"| Tugs available | {len(instance.tugs)} |\n")
        f.write(f"| Wall time | {result.wall_time:.1f} s |\n\n")

        if plan is None:
            f.write(f"No plan: {result.message or result.status}\n")
            return output_path

        f.write(f"Cargo phase: **{plan.t_cargo_days:g} d**, crew flight time: **{plan.t_crew_days:g} d**\n\n")

        uses = count_tug_uses(plan)
        if uses:
            f.write("## Tug Uses\n\n")
            f.write("| Tug | Departures |\n")
            f.write("|-----|------------|\n")
            for unit, count in uses.items():
                f.write(f"| {unit} | {count} |\n")
            f.write("\n")

        f.write("## Transport Arcs\n\n")
        f.write("| Layer | Arc | Vehicle | Payload (kg) | TOF (d) |\n")
        f.write("|-------|-----|---------|--------------|---------|\n")
        masses = dict(zip(instance.schema.names, instance.schema.mass_vector))
        for row in plan.transport():
            payload = sum(amount * masses.get(name, 1.0) for name, amount in row.flows.items())
            f.write(f"| {row.layer} | {row.origin} to {row.destination} | {row.vehicle or 'launch'} | "
                    f"{payload:,.0f} | {_fmt(row.tof_days, 'g')} |\n")
        f.write("\n")

    return output_path


def pareto_frame(points):
    """One row per sweep point, in the order given, with the pareto CSV columns."""
    records = [{
        'T_cargo': point.t_cargo,
        'T_crew': point.t_crew,
        'objective_kg': point.objective_kg,
        'savings_pct': point.savings_pct,
        'status': point.status,
        'gap': point.gap,
        'nodes': point.nodes,
        'tugs_used': point.tugs_used,
    } for point in points]
    return pd.DataFrame.from_records(records, columns=PARETO_COLUMNS)


def write_pareto_csv(points, output_path):
    """pareto.csv without timings, so identical sweeps give identical bytes."""
    pareto_frame(points).to_csv(output_path, index=False, float_format='%.10g')
    return output_path


def write_sweep_report(points, output_path, wall_time=None):
    report = {
        'generated_at': datetime.now().isoformat(timespec='seconds'),
        'wall_time': wall_time,
        'points': [{
            't_cargo': point.t_cargo,
            't_crew': point.t_crew,
            'status': point.status,
            'objective_kg': point.objective_kg,
            'savings_pct': point.savings_pct,
            'gap': point.gap,
            'nodes': point.nodes,
            'wall_time': point.wall_time,
            'cached': point.cached,
            'tug_uses': point.tug_uses,
            'message': point.message,
        } for point in points],
    }
    with open(output_path, 'w') as f:
        json.dump(report, f, indent=2)
    return output_path


def generate_sweep_summary(points, output_path):
    """Markdown table of the sweep, best savings first."""
    with open(output_path, 'w') as f:
        f.write("# Pareto Sweep Report\n\n")
        f.write(f"Generated on: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n\n")
        solved = [p for p in points if p.solved]
        f.write(f"Points solved: **{len(solved)}** of {len(points)}\n\n")
        f.write("| T_cargo (d) | T_crew (d) | IMLEO (kg) | Savings | Tugs | Status |\n")
        f.write("|-------------|------------|------------|---------|------|--------|\n")
        ranked = sorted(points, key=lambda p: -(p.savings_pct if p.savings_pct is not None else -1e9))
        for point in ranked:
            objective = f"{point.objective_kg:,.0f}" if point.solved else '-'
            savings = f"{point.savings_pct:.2f}%" if point.savings_pct is not None else '-'
            f.write(f"| {_days(point.t_cargo)} | {_days(point.t_crew)} | {objective} | {savings} | "
                    f"{point.tugs_used} | {point.status} |\n")
    return output_path


def audit_table(report, count=10):
    """Largest residuals first; violated rows always included."""
    violated = report.violated_rows
    worst = report.worst(count)
    table = pd.concat([violated, worst]).drop_duplicates(subset='constraint')
    return table.sort_values('residual', ascending=False, kind='mergesort')[AUDIT_COLUMNS]


def format_audit_summary(audit, count=10):
    """Plain-text summary printed by the validate command."""
    summary = audit.summary()
    lines = [
        f"Plan audit: {'PASSED' if audit.passed else 'FAILED'}",
        f"  Objective (IMLEO): {audit.objective_kg:,.1f} kg"
        + ('' if audit.objective_matches is None else f" (matches plan: {audit.objective_matches})"),
        f"  T_cargo: {audit.t_cargo_days:g} d, T_crew: {audit.t_crew_days:g} d",
        f"  Rows checked: {summary['rows']}, violated: {summary['violated_rows']}, "
        f"max residual: {summary['max_residual']:.4g}",
        f"  Bound / integrality / SOS2 violations: {summary['bound_violations']} / "
        f"{summary['integrality_violations']} / {summary['sos2_violations']}",
    ]
    if summary['worst_row']:
        lines.append(f"  Worst row: {summary['worst_row']}")
    lines.append('')
    lines.append(audit_table(audit.report, count).to_string(index=False, float_format=lambda v: f"{v:.4g}"))
    for name, value in audit.report.bound_violations[:count]:
        lines.append(f"  bound violated: {name} = {value:g}")
    return '\n'.join(lines)


def write_audit_csv(audit, output_path):
    audit.report.residuals.sort_values('residual', ascending=False, kind='mergesort').to_csv(output_path, index=False)
    return output_path


def write_plan_files(plan: FlowPlan, output_dir, commodities=None):
    os.makedirs(output_dir, exist_ok=True)
    json_path = os.path.join(output_dir, 'plan.json')
    csv_path = os.path.join(output_dir, 'plan.csv')
    write_plan_json(plan, json_path)
    write_plan_csv(plan, csv_path, commodities)
    return json_path, csv_path


def _days(value):
    return 'unbounded' if value is None else f"{value:g} d"


def _fmt(value, spec):
    if value is None:
        return '-'
    try:
        return format(value, spec)
    except (TypeError, ValueError):
        return str(value)
