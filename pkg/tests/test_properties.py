from hypothesis import given, settings
from hypothesis import strategies as st

from evoc import agent as ag
from evoc.fitness import chain_fitness, single_fitness
from evoc.metrics import make_record, p_create_histogram
from evoc.params import SimParams
from evoc.world import init_run, step
import random

positions = st.sampled_from((-1, 0, 1))
actions = st.tuples(*[positions] * 6)
chains = st.lists(actions, min_size=1, max_size=12).map(tuple)
probs = st.floats(0.0, 1.0)


@given(chains, actions)
def test_extension_strictly_increases(chain, step_):
    extended = chain + (step_,)
    gain = single_fitness(step_) / 1.2 ** len(chain)
    assert chain_fitness(extended) > chain_fitness(chain)
    assert abs(chain_fitness(extended) - (chain_fitness(chain) + gain)) < 1e-9


@given(actions)
def test_single_step_chain(a):
    assert chain_fitness((a,)) == single_fitness(a)


@given(st.floats(0.0, 1.0), st.floats(0.0, 50.0))
def test_p_create_stays_a_probability(p, rf):
    assert 0.0 <= ag.update_p_create(p, rf) <= 1.0


@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.integers(0, 30), st.integers(0, 30),
       st.integers(0, 8), st.integers(0, 8), st.floats(0.001, 1.0))
def test_biases_stay_bounded(bm, bs, m0, m1, s0, s1, eta):
    from evoc.fitness import FitnessTerms

    d = ag.update_biases(ag.TrendDetector(bm, bs), FitnessTerms(m0, s0, 0, 0), FitnessTerms(m1, s1, 0, 0), eta)
    assert -1.0 <= d.beta_move <= 1.0 and -1.0 <= d.beta_sym <= 1.0


@given(st.lists(probs, min_size=1, max_size=200))
def test_histogram_partitions(ps):
    hist = p_create_histogram(ps)
    assert sum(hist) == len(ps)
    rec = make_record(0, [((0,) * 6,)] * len(ps), [1.0] * len(ps), ps)
    assert rec.frac_imitators + rec.frac_creators <= 1.0
    assert 0 <= rec.frac_imitators <= 1 and 0 <= rec.frac_creators <= 1


@given(st.floats(0.0, 70.0), st.lists(st.tuples(chains, st.floats(0.0, 70.0)), min_size=1, max_size=6), st.integers(0, 2**32))
def test_imitate_never_worsens(fitness, nbrs, seed):
    s = ag.AgentState.with_chain(((0,) * 6,), SimParams())
    s.current = s.current._replace(fitness=fitness)
    got = ag.imitation_choice(fitness, nbrs, random.Random(seed))
    if got is None:
        assert all(f <= fitness for _, f in nbrs)
    else:
        assert got[1] > fitness


@settings(max_examples=25, deadline=None)
@given(
    st.integers(2, 6), st.integers(1, 6), st.booleans(), st.booleans(),
    st.floats(0.05, 1.0), st.integers(0, 2**32),
)
def test_world_invariants(w, h, sr, chaining, p_change, seed):
    if w * h < 2:
        return
    params = SimParams(grid_width=w, grid_height=h, sr_enabled=sr, chaining_enabled=chaining, p_change=p_change, seed=seed)
    state = init_run(params)
    before = [a.fitness for a in state.agents]
    for _ in range(12):
        rec = step(state, params)
        after = [a.fitness for a in state.agents]
        assert all(b >= a for a, b in zip(before, after))
        assert all(0.0 <= a.p_create <= 1.0 for a in state.agents)
        assert 1 <= rec.diversity <= w * h
        assert sum(rec.p_create_histogram) == w * h
        for a in state.agents:
            assert a.fitness == chain_fitness(a.chain)
            assert all(x != y for x, y in zip(a.chain, a.chain[1:]))
        before = after
