import itertools

import pytest
from hypothesis import given, settings

from app.core.schemas import Instance, Matching, Side
from app.core.service import is_stable
from app.oracle.service import (
    count_stable_pairs, enumerate_all_stable, export_stable_set, multiplicity_fraction, oracle_service,
)
from app.shared.errors import OracleGuardExceeded
from tests.strategies import instances


def brute_force(inst: Instance) -> set[Matching]:
    """Every matching of the instance, kept when stable."""
    found = set()
    options = [list(inst.men[m]) + [None] for m in range(inst.M)]
    for wives in itertools.product(*options):
        taken = [w for w in wives if w is not None]
        if len(taken) != len(set(taken)):
            continue
        mu = Matching.from_wives(list(wives), inst.W)
        if is_stable(inst, mu):
            found.add(mu)
    return found


class TestEnumeration:
    def test_single_pair(self):
        ss = enumerate_all_stable(Instance(men=((0,),), women=((0,),)))
        assert [mu.men for mu in ss.matchings] == [(0,)]

    def test_nobody_acceptable(self):
        ss = enumerate_all_stable(Instance(men=((0,),), women=((),)))
        assert [mu.men for mu in ss.matchings] == [(None,)]
        assert multiplicity_fraction(ss) == 0.0

    def test_folklore_every_pair_stable(self, folklore3):
        ss = enumerate_all_stable(folklore3)
        assert len(ss.matchings) == 3
        assert count_stable_pairs(ss) == 9
        assert multiplicity_fraction(ss) == 1.0

    def test_master_list_unique(self, master4):
        ss = enumerate_all_stable(master4)
        assert len(ss.matchings) == 1
        assert multiplicity_fraction(ss) == 0.0
        assert ss.optimal(Side.MAN) == ss.optimal(Side.WOMAN)

    def test_guard(self, folklore3):
        with pytest.raises(OracleGuardExceeded):
            enumerate_all_stable(folklore3, guard=2)

    def test_partners_are_best_first(self, folklore3):
        ss = enumerate_all_stable(folklore3)
        assert ss.partners(Side.WOMAN, 0) == [0, 1, 2]
        assert (ss.best(Side.WOMAN, 0), ss.worst(Side.WOMAN, 0)) == (0, 2)
        assert ss.partner_count(Side.MAN, 1) == 3

    @settings(max_examples=80, deadline=None)
    @given(instances(max_size=3))
    def test_matches_brute_force(self, inst):
        assert set(enumerate_all_stable(inst).matchings) == brute_force(inst)

    @settings(max_examples=40, deadline=None)
    @given(instances(max_size=4))
    def test_no_duplicates(self, inst):
        matchings = enumerate_all_stable(inst).matchings
        assert len(set(matchings)) == len(matchings)


class TestExport:
    def test_fields(self, folklore3):
        export = export_stable_set(enumerate_all_stable(folklore3))
        assert (export.M, export.W, export.count) == (3, 3, 3)
        assert export.stable_pair_count == len(export.stable_pairs) == 9
        assert export.men_partner_counts == [3, 3, 3]
        assert export.women_partner_counts == [3, 3, 3]
        assert export.multiplicity_fraction == 1.0

    def test_json_shape(self, master4):
        payload = export_stable_set(enumerate_all_stable(master4)).model_dump(mode="json")
        assert payload["format"] == 1
        assert payload["matchings"] == [{"men": [0, 1, 2, 3], "women": [0, 1, 2, 3]}]

    def test_service_validates_and_guards(self, folklore3):
        assert oracle_service.stable_set(folklore3).count == 3
        with pytest.raises(OracleGuardExceeded):
            oracle_service.stable_set(folklore3, guard=2)
