"""
Unit tests for the commodity schema and the event-driven network expansion
"""

import os
import shutil
import sys
import tempfile
import unittest

# Add parent directory to path to import modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from netgraph import (
    ArcSpec,
    Burn,
    CommoditySchema,
    CyclicLayer,
    DemandTable,
    DuplicateArc,
    InvalidSchema,
    LayerSpec,
    LayerTag,
    TofCurve,
    UnknownCommodity,
    UnknownNode,
    UnknownVehicle,
    VehicleNotAllowedInLayer,
    build_event_network,
    dump_network,
    load_network,
    reachable_commodities,
    validate_multigraph,
    with_holdover_allowed,
)
from trajmodels import BadBreakpoints, HighThrustModel, PwlModel

NODES = ['A', 'B', 'C']


def small_schema():
    return CommoditySchema([
        ('payload', 'continuous'),
        ('fuel', 'continuous'),
        ('truck', 'binary', 1000.0),
        ('van', 'binary', 500.0),
    ])


def truck_arc(origin, destination, vehicle='truck', allowed=None):
    return ArcSpec(origin, destination, vehicle, (Burn('fuel', HighThrustModel(1.0, 300.0, 2.0)),),
                   allowed_commodities=None if allowed is None else frozenset(allowed))


class TestCommoditySchema(unittest.TestCase):
    """Test cases for CommoditySchema"""

    def setUp(self):
        self.schema = small_schema()

    def test_ordering_and_masses(self):
        self.assertEqual(self.schema.names, ['payload', 'fuel', 'truck', 'van'])
        self.assertEqual(list(self.schema.mass_vector), [1.0, 1.0, 1000.0, 500.0])
        self.assertEqual(self.schema.index('truck'), 2)
        self.assertEqual(self.schema.discrete_names(), ['truck', 'van'])
        self.assertEqual(self.schema.continuous_names(), ['payload', 'fuel'])

    def test_mass_vector_is_read_only(self):
        with self.assertRaises(ValueError):
            self.schema.mass_vector[0] = 5.0

    def test_mask(self):
        self.assertEqual(list(self.schema.mask(['fuel', 'van'])), [False, True, False, True])

    def test_unknown_commodity(self):
        with self.assertRaises(UnknownCommodity):
            self.schema.index('water')

    def test_duplicate_name(self):
        with self.assertRaises(InvalidSchema):
            CommoditySchema([('a', 'continuous'), ('a', 'binary', 10.0)])

    def test_continuous_unit_mass(self):
        with self.assertRaises(InvalidSchema):
            CommoditySchema([('a', 'continuous', 2.0)])
        with self.assertRaises(InvalidSchema):
            CommoditySchema([('v', 'binary', 0.0)])

    def test_dict_round_trip(self):
        self.assertEqual(CommoditySchema.from_dict(self.schema.to_dict()), self.schema)


class TestEventNetwork(unittest.TestCase):
    """Test cases for build_event_network"""

    def setUp(self):
        self.schema = small_schema()
        self.specs = [
            LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B'), truck_arc('A', 'B', 'van'))),
            LayerSpec(LayerTag.CARGO_RETURN, (truck_arc('B', 'A'),)),
            LayerSpec(LayerTag.CREW_FORWARD, (truck_arc('A', 'C', 'van'), truck_arc('C', 'B', 'van'))),
        ]
        self.network = build_event_network(NODES, self.specs, self.schema)

    def test_layers_and_tags(self):
        self.assertEqual(len(self.network.layers), 3)
        self.assertEqual(self.network.layer(2).tag, LayerTag.CARGO_RETURN)
        self.assertEqual(self.network.cargo_events(), [1, 2])
        self.assertEqual(self.network.crew_events(), [3])
        self.assertTrue(LayerTag.CREW_RETURN.is_crew)
        self.assertIn(LayerTag.CARGO_FORWARD, LayerTag.cargo())

    def test_holdovers_connect_consecutive_layers(self):
        self.assertEqual(len(self.network.holdover_arcs), len(NODES) * 2)
        hold = self.network.holdover('B', 2)
        self.assertEqual(hold.to_event, 3)
        self.assertIsNone(self.network.holdover('B', 3))

    def test_parallel_arcs_per_vehicle(self):
        arcs = self.network.find_arcs('A', 'B', 1)
        self.assertEqual(sorted(arc.vehicle for arc in arcs), ['truck', 'van'])
        self.assertEqual(arcs[0].name, 'A__B__truck__1')
        self.assertEqual(len(self.network.outgoing('A', 1)), 2)
        self.assertEqual(len(self.network.incoming('B', 1)), 2)

    def test_topological_order(self):
        order = self.network.topological_order(3)
        self.assertLess(order.index('A'), order.index('C'))
        self.assertLess(order.index('C'), order.index('B'))

    def test_launch_arc_properties(self):
        network = build_event_network(NODES, [LayerSpec(LayerTag.CARGO_FORWARD, (ArcSpec('A', 'B', None),))],
                                      self.schema)
        arc = network.transport_arcs[0]
        self.assertTrue(arc.is_launch)
        self.assertEqual(arc.name, 'A__B__none__1')
        self.assertEqual(arc.time_coefficients(), (0.0, 0.0))

    def test_cyclic_layer_rejected(self):
        specs = [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B'), truck_arc('B', 'A')))]
        with self.assertRaises(CyclicLayer) as context:
            build_event_network(NODES, specs, self.schema)
        self.assertEqual(context.exception.event, 1)

    def test_unknown_node(self):
        specs = [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'Z'),))]
        with self.assertRaises(UnknownNode):
            build_event_network(NODES, specs, self.schema)

    def test_vehicle_must_be_discrete(self):
        specs = [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B', 'payload'),))]
        with self.assertRaises(UnknownVehicle):
            build_event_network(NODES, specs, self.schema)

    def test_unknown_allowed_commodity(self):
        specs = [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B', allowed={'truck', 'water'}),))]
        with self.assertRaises(UnknownCommodity):
            build_event_network(NODES, specs, self.schema)

    def test_holdover_allow_list(self):
        network = build_event_network(NODES, self.specs, self.schema, holdover_allowed={('A', 1): ['fuel']})
        self.assertEqual(network.holdover('A', 1).allowed_commodities, frozenset({'fuel'}))
        self.assertIsNone(network.holdover('B', 1).allowed_commodities)
        replaced = with_holdover_allowed(network, {('B', 1): ['payload']})
        self.assertEqual(replaced.holdover('B', 1).allowed_commodities, frozenset({'payload'}))
        self.assertEqual(replaced.holdover('A', 1).allowed_commodities, frozenset({'fuel'}))

    def test_dump_and_load(self):
        temp_dir = tempfile.mkdtemp()
        try:
            path = os.path.join(temp_dir, 'network.json')
            dump_network(self.network, path)
            loaded = load_network(path)
        finally:
            shutil.rmtree(temp_dir)
        self.assertEqual([arc.name for arc in loaded.transport_arcs],
                         [arc.name for arc in self.network.transport_arcs])
        self.assertEqual(loaded.transport_arcs[0].burns, self.network.transport_arcs[0].burns)
        self.assertEqual(loaded.schema, self.schema)

    def test_time_pwl_uses_the_tof_curve(self):
        sep = PwlModel((0.0, 5000.0, 10000.0), (0.0, 4600.0, 9000.0), (5.0, 7.0, 9.0))
        spec = ArcSpec('A', 'B', 'truck', (Burn('fuel', sep),))
        arc = build_event_network(NODES, [LayerSpec(LayerTag.CARGO_FORWARD, (spec,))], self.schema).transport_arcs[0]
        curve = arc.time_pwl()
        self.assertIsInstance(curve, TofCurve)
        self.assertEqual(curve.breakpoints_kg, (0.0, 5000.0, 10000.0))
        self.assertEqual(curve.tof_days, (5.0, 7.0, 9.0))

        no_tof = ArcSpec('A', 'B', 'truck', (Burn('fuel', PwlModel((0.0, 1.0), (0.0, 0.9))),))
        arc = build_event_network(NODES, [LayerSpec(LayerTag.CARGO_FORWARD, (no_tof,))], self.schema).transport_arcs[0]
        self.assertIsNone(arc.time_pwl())

    def test_explicit_tof_curve_survives_dump(self):
        curve = TofCurve((0.0, 2000.0), (10.0, 30.0))
        spec = ArcSpec('A', 'B', 'truck', (Burn('fuel', HighThrustModel(1.0, 300.0)),), pwl_tof=curve)
        network = build_event_network(NODES, [LayerSpec(LayerTag.CARGO_FORWARD, (spec,))], self.schema)
        temp_dir = tempfile.mkdtemp()
        try:
            path = os.path.join(temp_dir, 'network.json')
            dump_network(network, path)
            loaded = load_network(path)
        finally:
            shutil.rmtree(temp_dir)
        self.assertEqual(loaded.transport_arcs[0].time_pwl(), curve)

    def test_tof_curve_validation(self):
        with self.assertRaises(BadBreakpoints):
            TofCurve((0.0, 1.0), (1.0,))
        with self.assertRaises(BadBreakpoints):
            TofCurve((1.0, 0.0), (1.0, 2.0))


class TestMultigraphValidation(unittest.TestCase):
    """Test cases for validate_multigraph"""

    def setUp(self):
        self.schema = small_schema()

    def test_duplicate_arc(self):
        specs = [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B'), truck_arc('A', 'B')))]
        network = build_event_network(NODES, specs, self.schema)
        with self.assertRaises(DuplicateArc):
            validate_multigraph(network)
        report = validate_multigraph(network, strict=False)
        self.assertFalse(report.is_clean)
        self.assertEqual(len(report.duplicates), 1)

    def test_vehicle_admissibility(self):
        specs = [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B'),)),
                 LayerSpec(LayerTag.CREW_FORWARD, (truck_arc('A', 'B'),))]
        network = build_event_network(NODES, specs, self.schema)
        admissibility = {'truck': LayerTag.cargo()}
        with self.assertRaises(VehicleNotAllowedInLayer):
            validate_multigraph(network, admissibility)
        report = validate_multigraph(network, admissibility, strict=False)
        self.assertEqual(report.inadmissible, [('truck', 2, 'crew_forward')])

    def test_carried_vehicle_is_checked(self):
        """A vehicle riding as cargo on another vehicle's arc still counts"""
        specs = [LayerSpec(LayerTag.CREW_FORWARD, (truck_arc('A', 'B', 'van', allowed={'van', 'truck'}),))]
        network = build_event_network(NODES, specs, self.schema)
        report = validate_multigraph(network, {'truck': LayerTag.cargo()}, strict=False)
        self.assertEqual(report.inadmissible, [('truck', 1, 'crew_forward')])

    def test_clean_network(self):
        specs = [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B'), truck_arc('A', 'B', 'van')))]
        network = build_event_network(NODES, specs, self.schema)
        self.assertTrue(validate_multigraph(network, {'truck': LayerTag.cargo()}).is_clean)


class TestDemandTable(unittest.TestCase):
    """Test cases for DemandTable"""

    def setUp(self):
        self.schema = small_schema()
        self.table = DemandTable(NODES, self.schema)

    def test_set_and_add(self):
        self.table.set('A', 1, 'payload', float('inf'))
        self.table.set('B', 2, 'payload', -100.0)
        self.table.add('B', 2, 'payload', -50.0)
        self.table.set('A', 1, 'truck', 1)
        self.assertEqual(self.table.value('B', 2, 'payload'), -150.0)
        self.assertEqual(self.table.value('C', 1, 'fuel'), 0.0)
        self.assertEqual(self.table.supplied('A', 1), {'payload', 'truck'})
        self.assertEqual(len(self.table), 2)

    def test_unknown_entries(self):
        with self.assertRaises(UnknownNode):
            self.table.set('Z', 1, 'payload', 1.0)
        with self.assertRaises(UnknownCommodity):
            self.table.set('A', 1, 'water', 1.0)

    def test_check_event_range(self):
        network = build_event_network(NODES, [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B'),))],
                                      self.schema)
        self.table.set('A', 2, 'payload', 1.0)
        with self.assertRaises(ValueError):
            self.table.check(network)


class TestReachability(unittest.TestCase):
    """Test cases for reachable_commodities"""

    def test_propagation_needs_the_vehicle(self):
        specs = [
            LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B', allowed={'payload', 'fuel', 'truck'}),)),
            LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('B', 'C', 'van'),)),
        ]
        supplies = {('A', 1): {'payload', 'fuel', 'truck'}}
        reachable = reachable_commodities(NODES, specs, lambda node, event: supplies.get((node, event), ()))
        self.assertEqual(reachable[('B', 1)], frozenset({'payload', 'fuel', 'truck'}))
        self.assertEqual(reachable[('B', 2)], frozenset({'payload', 'fuel', 'truck'}))
        self.assertEqual(reachable[('C', 2)], frozenset())

    def test_allow_list_filters(self):
        specs = [LayerSpec(LayerTag.CARGO_FORWARD, (truck_arc('A', 'B', allowed={'truck'}),))]
        supplies = {('A', 1): {'payload', 'truck'}}
        reachable = reachable_commodities(NODES, specs, lambda node, event: supplies.get((node, event), ()))
        self.assertEqual(reachable[('B', 1)], frozenset({'truck'}))


if __name__ == '__main__':
    unittest.main()
