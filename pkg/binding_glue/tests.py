from django.test import SimpleTestCase
from hypothesis import given, strategies as st

from allocators.procedures import Procedure
from resource_core.regions import Region, ResourceKind

from .bindings import (
    BindingTable,
    Tagged,
    Uniqueness,
    append,
    bind,
    remove,
    unbind_fst,
    unbind_snd,
)
from .exceptions import DuplicateEntry, InadmissiblePair, NamesExhausted, NotFound, RightSideTaken
from .names import NameKind, NamePool, assign_names

P1 = Procedure('p1', 5, 1)
P2 = Procedure('p2', 7, 1)


def region(lo, hi, kind=ResourceKind.MEMORY):
    return Region(kind, lo, hi)


admissible_pairs = st.one_of(
    st.builds(
        lambda lo, n: (Tagged.proc(P1), Tagged.region(region(lo, lo + n))),
        st.integers(0, 100), st.integers(0, 10),
    ),
    st.builds(lambda n: (Tagged.proc(P2), Tagged.name(n)), st.integers(1, 1000)),
    st.builds(
        lambda lo, n: (Tagged.procseg(region(0, n, ResourceKind.PROCEDURE)),
                       Tagged.vmseg(region(lo, lo + n, ResourceKind.VIRTUAL_MEMORY))),
        st.integers(0, 100), st.integers(0, 10),
    ),
    st.builds(
        lambda lo: (Tagged.vmpage(region(lo, lo + 3, ResourceKind.VIRTUAL_MEMORY)),
                    Tagged.frame(region(lo * 4, lo * 4 + 3))),
        st.integers(0, 100),
    ),
)


class BindTests(SimpleTestCase):
    def test_bind_procedure_to_region(self):
        b = bind(Tagged.proc(P1), Tagged.region(region(0, 4)))
        self.assertEqual(unbind_fst(b).value, P1)
        self.assertEqual(unbind_snd(b).value, region(0, 4))

    def test_bind_procedure_to_name(self):
        b = bind(Tagged.proc(P1), Tagged.name(7))
        self.assertEqual(unbind_fst(b), Tagged.proc(P1))
        self.assertEqual(unbind_snd(b).value, 7)

    def test_region_to_region_is_inadmissible(self):
        with self.assertRaises(InadmissiblePair):
            bind(Tagged.region(region(0, 1)), Tagged.region(region(2, 3)))

    def test_empty_side_is_inadmissible(self):
        with self.assertRaises(InadmissiblePair):
            bind(Tagged.proc(P1), Tagged.name(''))

    @given(admissible_pairs)
    def test_projection_round_trip(self, pair):
        o1, o2 = pair
        b = bind(o1, o2)
        self.assertEqual((unbind_fst(b), unbind_snd(b)), (o1, o2))


class TableTests(SimpleTestCase):
    def test_append_to_empty(self):
        b = bind(Tagged.proc(P1), Tagged.name(7))
        table = append(BindingTable(), b)
        self.assertEqual(list(table), [b])

    def test_tables_are_values(self):
        empty = BindingTable()
        append(empty, bind(Tagged.proc(P1), Tagged.name(7)))
        self.assertEqual(len(empty), 0)

    def test_duplicate_entry(self):
        b = bind(Tagged.proc(P1), Tagged.name(7))
        with self.assertRaises(DuplicateEntry):
            append(append(BindingTable(), b), b)

    def test_one_to_one_right_side_taken(self):
        table = append(BindingTable(), bind(Tagged.proc(P1), Tagged.name(7)))
        with self.assertRaises(RightSideTaken):
            append(table, bind(Tagged.proc(P2), Tagged.name(7)))

    def test_many_to_one_allows_shared_right_side(self):
        table = append(BindingTable.many_to_one(), bind(Tagged.proc(P1), Tagged.name(7)))
        table = append(table, bind(Tagged.proc(P2), Tagged.name(7)))
        self.assertEqual(len(table), 2)
        self.assertIs(table.uniqueness_mode, Uniqueness.MANY_TO_ONE)

    def test_remove_frees_right_side(self):
        b = bind(Tagged.proc(P1), Tagged.name(7))
        table = remove(append(BindingTable(), b), b)
        self.assertNotIn(b, table)
        rebound = append(table, bind(Tagged.proc(P2), Tagged.name(7)))
        self.assertEqual([unbind_fst(e).value for e in rebound], [P2])

    def test_many_to_one_remove_keeps_other_sharers(self):
        a, b = bind(Tagged.proc(P1), Tagged.name(7)), bind(Tagged.proc(P2), Tagged.name(7))
        table = remove(append(append(BindingTable.many_to_one(), a), b), a)
        self.assertEqual(list(table), [b])
        self.assertIn(b, table)

    def test_remove_missing(self):
        with self.assertRaises(NotFound):
            remove(BindingTable(), bind(Tagged.proc(P1), Tagged.name(1)))

    def test_bound_to_keeps_append_order(self):
        first = bind(Tagged.proc(P1), Tagged.region(region(0, 4)))
        second = bind(Tagged.proc(P1), Tagged.region(region(9, 9)))
        table = append(append(append(BindingTable(), first), bind(Tagged.proc(P2), Tagged.region(region(5, 8)))), second)
        self.assertEqual(table.bound_to(P1), [first, second])

    @given(st.lists(st.integers(1, 50), min_size=1, max_size=20, unique=True), st.data())
    def test_remove_then_append_moves_entry_to_end(self, names, data):
        entries = [bind(Tagged.proc(P1), Tagged.name(n)) for n in names]
        table = BindingTable()
        for b in entries:
            table = append(table, b)
        b = data.draw(st.sampled_from(entries))
        table = append(remove(table, b), b)
        expected = [e for e in entries if e != b] + [b]
        self.assertEqual(list(table), expected)


class AssignNamesTests(SimpleTestCase):
    def test_lowest_available_first(self):
        pa, pb = Procedure('pa', 1, 1), Procedure('pb', 1, 1)
        names = NamePool.process_ids(3)
        table = assign_names([pa, pb], names)
        self.assertEqual([(unbind_fst(b).value, unbind_snd(b).value) for b in table], [(pa, 1), (pb, 2)])
        self.assertEqual(list(names.available), [3])
        self.assertEqual(names.issued, {1, 2})

    def test_names_exhausted(self):
        procs = [Procedure(n, 1, 1) for n in ('pa', 'pb', 'pc')]
        names = NamePool.process_ids(2)
        with self.assertRaises(NamesExhausted) as ctx:
            assign_names(procs, names)
        self.assertEqual(ctx.exception.context['procedure'], 'pc')
        self.assertEqual(list(names.available), [1, 2])
        self.assertEqual(names.issued, set())

    def test_shared_names_need_one_name(self):
        with self.assertRaises(NamesExhausted):
            assign_names([Procedure('pa', 1, 1)], NamePool(NameKind.PROCESS_IDS), unique=False)
        self.assertEqual(len(assign_names([], NamePool(NameKind.PROCESS_IDS), unique=False)), 0)

    def test_shared_names(self):
        procs = [Procedure(n, 1, 1) for n in ('pa', 'pb', 'pc')]
        names = NamePool(NameKind.PROCESS_IDS, [9])
        table = assign_names(procs, names, unique=False)
        self.assertEqual([unbind_snd(b).value for b in table], [9, 9, 9])
        self.assertEqual(list(names.available), [9])

    def test_file_names_sorted(self):
        names = NamePool.file_names(['zeta', 'alpha'])
        self.assertEqual(names.lowest(), 'alpha')
