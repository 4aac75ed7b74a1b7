import random

from django.test import SimpleTestCase, override_settings

from allocators.procedures import Procedure
from binding_glue.bindings import unbind_fst, unbind_snd
from resource_core.audit import audit_partition
from resource_core.pools import time_pool

from .environment import Environment, close_proc, resume_proc, schedule_next
from .exceptions import MissingPriority, NoClosure, NotCurrent
from .policies import SchedulePolicy, ScheduleVariant, build_schedule
from .simulation import Multitasking, Scheduler, carve_interval, run_simulation, switch
from .trace import Attribution, SwitchTrace, TraceOp


def procs_with_times(*times, priorities=None):
    priorities = priorities or [None] * len(times)
    return [Procedure(f'p{i}', 1, t, priority=pr) for i, (t, pr) in enumerate(zip(times, priorities), start=1)]


def plan_of(plan):
    return [(s.proc.name, s.length) for s in plan]


def reference_plan(procs, policy):
    """Tick-by-tick reference simulator."""
    remaining = {p.name: p.declared_time for p in procs}
    position = {p.name: i for i, p in enumerate(procs)}
    plan = []

    if policy.variant is ScheduleVariant.ROUND_ROBIN:
        ready = list(procs)
        while ready:
            p = ready.pop(0)
            ran = 0
            while ran < policy.quantum and remaining[p.name]:
                remaining[p.name] -= 1
                ran += 1
            plan.append((p.name, ran))
            if remaining[p.name]:
                ready.append(p)
        return plan

    while any(remaining.values()):
        waiting = [p for p in procs if remaining[p.name]]
        if policy.variant is ScheduleVariant.SHORTEST_JOB_FIRST:
            p = min(waiting, key=lambda q: (q.declared_time, position[q.name]))
        elif policy.variant is ScheduleVariant.PRIORITY:
            p = min(waiting, key=lambda q: (q.priority, position[q.name]))
        else:
            p = waiting[0]
        ran = 0
        while remaining[p.name]:
            remaining[p.name] -= 1
            ran += 1
        plan.append((p.name, ran))
    return plan


class CarveIntervalTests(SimpleTestCase):
    def test_consecutive_minting(self):
        time = time_pool()
        first, second = carve_interval(time, 5), carve_interval(time, 2)
        self.assertEqual((first.u_min, first.u_max), (0, 4))
        self.assertEqual((second.u_min, second.u_max), (5, 6))

    def test_thousand_carves_disjoint(self):
        time = time_pool()
        rng = random.Random(3)
        intervals = [carve_interval(time, rng.randint(1, 9)) for _ in range(1000)]
        for i, a in enumerate(intervals):
            for b in intervals[i + 1:i + 5]:
                self.assertFalse(a.overlaps(b))
        self.assertTrue(audit_partition(time).passed)


class BuildScheduleTests(SimpleTestCase):
    def setUp(self):
        self.procs = procs_with_times(3, 1, 2)

    def test_fcfs(self):
        self.assertEqual(plan_of(build_schedule(self.procs, SchedulePolicy.fcfs())), [('p1', 3), ('p2', 1), ('p3', 2)])

    def test_sjf(self):
        self.assertEqual(plan_of(build_schedule(self.procs, SchedulePolicy.sjf())), [('p2', 1), ('p3', 2), ('p1', 3)])

    def test_round_robin(self):
        self.assertEqual(
            plan_of(build_schedule(self.procs, SchedulePolicy.round_robin(1))),
            [('p1', 1), ('p2', 1), ('p3', 1), ('p1', 1), ('p3', 1), ('p1', 1)],
        )

    def test_priority_ascending_and_stable(self):
        procs = procs_with_times(1, 1, 1, priorities=[2, 0, 2])
        self.assertEqual(plan_of(build_schedule(procs, SchedulePolicy.priority())), [('p2', 1), ('p1', 1), ('p3', 1)])

    def test_priority_needs_every_priority(self):
        with self.assertRaises(MissingPriority):
            build_schedule(procs_with_times(1, 2, priorities=[1, None]), SchedulePolicy.priority())

    def test_descriptors(self):
        for text in ('fcfs', 'sjf', 'prio', 'rr:3'):
            self.assertEqual(SchedulePolicy.from_descriptor(text).descriptor, text)

    def test_plans_match_reference_simulator(self):
        rng = random.Random(42)
        policies = [
            SchedulePolicy.fcfs(), SchedulePolicy.sjf(), SchedulePolicy.priority(),
            SchedulePolicy.round_robin(1), SchedulePolicy.round_robin(2), SchedulePolicy.round_robin(3),
        ]
        for _ in range(1500):
            n = rng.randint(1, 6)
            procs = procs_with_times(
                *(rng.randint(1, 8) for _ in range(n)),
                priorities=[rng.randint(0, 3) for _ in range(n)],
            )
            for policy in policies:
                self.assertEqual(plan_of(build_schedule(procs, policy)), reference_plan(procs, policy))


class EnvironmentTests(SimpleTestCase):
    def setUp(self):
        self.p1, self.p2 = procs_with_times(3, 2)
        self.env = Environment.initial('p0').admit([self.p1, self.p2])

    def test_close_keeps_remaining_time(self):
        env = resume_proc(self.env, schedule_next(self.env, 'p1'))
        env = close_proc(env.consume('p1'), 'p1')
        self.assertEqual(env.closures['p1'].remaining_time, 2)

    def test_close_null_procedure(self):
        env = close_proc(self.env, 'p0')
        self.assertEqual(env.closures['p0'].remaining_time, 0)

    def test_close_non_current(self):
        with self.assertRaises(NotCurrent):
            close_proc(self.env, 'p2')

    def test_schedule_returns_stored_snapshot(self):
        env = resume_proc(self.env, schedule_next(self.env, 'p2'))
        env = close_proc(env.consume('p2'), 'p2')
        self.assertEqual(schedule_next(env, 'p2'), env.closures['p2'])
        self.assertEqual(schedule_next(env, 'p0').owner, 'p0')

    def test_schedule_unknown(self):
        with self.assertRaises(NoClosure):
            schedule_next(self.env, 'p9')

    def test_resume_sets_current(self):
        env = resume_proc(self.env, schedule_next(self.env, 'p2'))
        self.assertEqual(env.current, 'p2')
        self.assertEqual(env.closures['p2'].resume_count, 1)

    def test_idle_and_loaded_markers(self):
        trace = SwitchTrace()
        env = resume_proc(self.env, schedule_next(self.env, 'p1'), trace)
        env = resume_proc(close_proc(env, 'p1'), schedule_next(env, 'p0'), trace)
        self.assertEqual([e.op for e in trace], [TraceOp.LOADED, TraceOp.IDLE])
        self.assertTrue(env.idle)


class SwitchTests(SimpleTestCase):
    def setUp(self):
        self.procs = ['p0', 'p1', 'p2']
        self.env = Environment.initial('p0').admit(procs_with_times(3, 2))
        self.trace = SwitchTrace()
        self.env = switch(self.procs, 0, 1, self.env, self.trace)

    def test_operator_sequence(self):
        switch(self.procs, 1, 2, self.env, self.trace)
        self.assertEqual(
            [(e.op, e.proc) for e in self.trace.events[-5:]],
            [(TraceOp.SEL, 'p1'), (TraceOp.CLOSE, 'p1'), (TraceOp.SEL, 'p2'),
             (TraceOp.SCHEDULE, 'p2'), (TraceOp.RESUME, 'p2')],
        )

    def test_switch_to_null_goes_idle(self):
        env = switch(self.procs, 1, 0, self.env, self.trace)
        self.assertEqual(self.trace.events[-1].op, TraceOp.IDLE)
        self.assertEqual(env.current, 'p0')

    def test_switch_to_self(self):
        env = switch(self.procs, 1, 1, self.env, self.trace)
        self.assertEqual(env.current, 'p1')
        self.assertEqual(self.trace.ordering_violations(), [])

    def test_cooperative_outgoing_acts_itself(self):
        switch(self.procs, 1, 2, self.env, self.trace, mode=Multitasking.COOPERATIVE)
        attributions = [e.attribution for e in self.trace.events[-5:]]
        self.assertEqual(attributions, [Attribution.SELF, Attribution.SELF, Attribution.OS, Attribution.OS, Attribution.OS])


@override_settings(OSMODEL={'NULL_PROCEDURE': 'p0', 'MULTITASKING': 'preemptive'})
class RunSimulationTests(SimpleTestCase):
    def test_single_procedure(self):
        time = time_pool()
        trace = run_simulation(procs_with_times(3), SchedulePolicy.fcfs(), time)
        ops = [e.op for e in trace]
        self.assertEqual(ops[5], TraceOp.LOADED)
        self.assertEqual(ops[-1], TraceOp.IDLE)
        self.assertEqual(trace.events[-1].tick, 3)
        self.assertEqual(time.next_fresh, 3)

    def test_round_robin_switch_count(self):
        trace = run_simulation(procs_with_times(2, 1), SchedulePolicy.round_robin(1), time_pool())
        # three switches between user procedures and the return to p0
        self.assertEqual(trace.switch_count, 4)
        self.assertEqual(len(trace), 5 * 4 + 2)

    def test_empty_run(self):
        scheduler = Scheduler(time_pool())
        trace = scheduler.run([], SchedulePolicy.fcfs())
        self.assertEqual(len(trace), 0)
        self.assertEqual(scheduler.env.current, 'p0')

    def test_time_bindings(self):
        scheduler = Scheduler(time_pool())
        scheduler.run(procs_with_times(2, 1), SchedulePolicy.round_robin(1))
        self.assertEqual(
            [(unbind_fst(b).value.name, unbind_snd(b).value.u_min) for b in scheduler.table],
            [('p1', 0), ('p2', 1), ('p1', 2)],
        )

    def test_on_tick_reports_executed_ticks(self):
        seen = []
        run_simulation(
            procs_with_times(2, 1), SchedulePolicy.round_robin(1), time_pool(),
            on_tick=lambda p, executed, tick: seen.append((p.name, executed, tick)),
        )
        self.assertEqual(seen, [('p1', 1, 0), ('p2', 1, 1), ('p1', 2, 2)])

    def test_ordering_invariants_and_tick_conservation(self):
        rng = random.Random(500)
        for _ in range(500):
            n = rng.randint(1, 6)
            procs = procs_with_times(
                *(rng.randint(1, 8) for _ in range(n)),
                priorities=[rng.randint(0, 5) for _ in range(n)],
            )
            policy = rng.choice([
                SchedulePolicy.fcfs(), SchedulePolicy.sjf(), SchedulePolicy.priority(),
                SchedulePolicy.round_robin(rng.randint(1, 3)),
            ])
            mode = rng.choice(list(Multitasking))
            scheduler = Scheduler(time_pool(), mode=mode)
            trace = scheduler.run(procs, policy)
            self.assertEqual(trace.ordering_violations(), [])
            self.assertEqual(scheduler.clock, sum(p.declared_time for p in procs))
            self.assertEqual(sum(unbind_snd(b).value.size for b in scheduler.table), scheduler.clock)
            self.assertTrue(all(v == 0 for v in scheduler.env.remaining.values()))


class SchedulerInvariantTests(SimpleTestCase):
    def random_procs(self, rng, scale=1):
        n = rng.randint(1, 6)
        return procs_with_times(*(rng.randint(1, 8) * scale for _ in range(n)))

    def test_time_only_drains_from_current_procedure(self):
        rng = random.Random(77)
        for _ in range(300):
            procs = self.random_procs(rng)
            policy = rng.choice([
                SchedulePolicy.fcfs(), SchedulePolicy.sjf(), SchedulePolicy.round_robin(rng.randint(1, 3)),
            ])
            scheduler = Scheduler(time_pool(), mode=rng.choice(list(Multitasking)))
            before = {p.name: p.declared_time for p in procs}

            def on_tick(p, executed, tick):
                env = scheduler.env
                changed = {
                    name: left - env.remaining[name] for name, left in before.items() if env.remaining[name] != left
                }
                self.assertEqual(changed, {p.name: 1})
                self.assertEqual(env.current, p.name)
                self.assertFalse(env.idle)
                before.update(env.remaining)

            scheduler.run(procs, policy, on_tick=on_tick)
            self.assertEqual(before, dict(scheduler.env.remaining))
            self.assertTrue(all(left == 0 for left in before.values()))
            self.assertTrue(scheduler.env.idle)
            self.assertEqual(scheduler.env.closures[scheduler.env.null_proc].remaining_time, 0)

    def test_sjf_order_ignores_time_scale(self):
        rng = random.Random(91)
        for _ in range(500):
            seed = rng.random()
            procs = self.random_procs(random.Random(seed))
            scale = rng.randint(2, 9)
            scaled = self.random_procs(random.Random(seed), scale=scale)
            plan = build_schedule(procs, SchedulePolicy.sjf())
            scaled_plan = build_schedule(scaled, SchedulePolicy.sjf())
            self.assertEqual([s.proc.name for s in plan], [s.proc.name for s in scaled_plan])
            self.assertEqual([s.length * scale for s in plan], [s.length for s in scaled_plan])
            self.assertEqual(plan[0].proc.declared_time, min(p.declared_time for p in procs))
