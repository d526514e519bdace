import numpy as np
import pytest

from surfpde.geometry import fibonacci_sphere_nodes, sphere_surface, torus_nodes
from surfpde.problems import (REGISTRY, CrossDiffusionProblem,
    ForcedHeatTorusProblem, HeatSphereProblem, PoissonProblem, ProblemRun,
    RunRecord, SphereAdvectionProblem, TuringParams, TuringProblem,
    advect_torus, converge, cross_diffusion_static, poisson_bvp,
    turing_static)
from surfpde.problems.exact import (TEST_FUNCTIONS, cosine_bell_sphere,
    cosine_bells_torus, expanding_sphere_forcing, forced_heat_torus_exact,
    heat_sphere_exact, poisson_forcing, sectoral_harmonic,
    spherical_to_cartesian, sphere_velocity, sphere_velocity_components,
    torus_velocity)


def test_poisson_forcing_of_product():
    x = fibonacci_sphere_nodes(100).points

    f = poisson_forcing(sphere_surface(), TEST_FUNCTIONS['u2'], x)

    assert np.allclose(f, -6 * x[:, 0] * x[:, 1])


def test_torus_solution_value():
    x = np.array([[4.0 / 3, 0.0, 0.0]])

    assert forced_heat_torus_exact(x, 0.0)[0] == pytest.approx(0.93644,
        abs=1e-5)
    assert forced_heat_torus_exact(x, 0.2)[0] == pytest.approx(
        0.93644 * np.exp(-1.0), abs=1e-5)


def test_sphere_velocity():
    x = np.array([[1.0, 0.0, 0.0]])

    assert np.allclose(sphere_velocity(x), [[0.0, 0.0, 1.0]])

    u, v = sphere_velocity_components(0.0, 0.0)
    assert (u, v) == (pytest.approx(0.0, abs=1e-15), pytest.approx(1.0))
    assert np.allclose(spherical_to_cartesian(0.0, 0.0, u, v),
        [0.0, 0.0, 1.0])


def test_sphere_velocity_is_tangent():
    x = fibonacci_sphere_nodes(200).points

    for alpha in (0.0, 0.3, np.pi / 2):
        v = sphere_velocity(x, alpha)
        assert np.abs(np.einsum('ij,ij->i', v, x)).max() < 1e-14


def test_torus_velocity():
    nodes = torus_nodes(1000)
    v = torus_velocity(nodes.points)
    speed = np.linalg.norm(v, axis=1)

    assert 3.9 <= speed.max() <= 4.2
    assert np.abs(np.einsum('ij,ij->i', v, nodes.normals)).max() < 1e-12


def test_sectoral_harmonic_is_normalized():
    x = fibonacci_sphere_nodes(4000).points

    for n in (1, 3, 7):
        Y = sectoral_harmonic(n, x)
        assert 4 * np.pi * np.mean(Y * Y) == pytest.approx(1.0, rel=1e-2)


def test_heat_sphere_exact_decays():
    x = fibonacci_sphere_nodes(500).points

    u0 = heat_sphere_exact(x, 0.0)
    u1 = heat_sphere_exact(x, 0.5)

    assert np.abs(u1).max() < np.abs(u0).max()


def test_initial_bells():
    sphere = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    torus = np.array([[4.0 / 3, 0.0, 0.0], [0.0, 4.0 / 3, 0.0]])

    assert cosine_bell_sphere(sphere).tolist() == [1.0, 0.0]
    assert np.allclose(cosine_bells_torus(torus), [1.0, 0.1])


def test_expanding_sphere_forcing():
    x = np.array([[0.6, 0.8, 0.0]])

    assert expanding_sphere_forcing(x, 0.0)[0] == pytest.approx(2 * 0.48)


def test_registry():
    assert {'poisson', 'heat_sphere', 'heat_torus', 'advect_sphere',
        'advect_torus', 'turing', 'cross_diffusion', 'moving'} \
        <= set(REGISTRY)


def test_converge_unknown_problem():
    with pytest.raises(ValueError):
        converge('wave', [100])


def test_problem_rejects_parameters():
    with pytest.raises(ValueError):
        PoissonProblem(dt=0.1)

    with pytest.raises(ValueError):
        PoissonProblem(surface='torus')

    with pytest.raises(ValueError):
        SphereAdvectionProblem(init='two_gaussian_bells')

    with pytest.raises(ValueError):
        TuringProblem(pattern='waves')


def test_problem_run_validation():
    with pytest.raises(ValueError):
        ProblemRun('poisson', {}, [])

    with pytest.raises(ValueError):
        ProblemRun('poisson', {}, [RunRecord(0.2, 100, 0.2, -1.0, 0.0)])


def test_problem_run_rows():
    run = ProblemRun.merged([
        ProblemRun('poisson', {}, [RunRecord(0.2, 100, 0.2, 4e-2, 1.0)]),
        ProblemRun('poisson', {}, [RunRecord(0.1, 400, 0.1, 1e-2, 2.0)]),
    ])

    assert run.error == 1e-2
    assert run.wall_time == 3.0
    assert run.eoc() == pytest.approx([2.0])

    rows = run.error_rows()
    assert rows[0] == [0.2, 100, 0.2, 4e-2, '']
    assert rows[1][4] == pytest.approx(2.0)
    assert run.timing_rows() == [[0.2, 100, 1.0], [0.1, 400, 2.0]]


def test_problem_run_without_errors():
    run = ProblemRun('turing', {}, [RunRecord(500, 500, 0.1, None, 1.0),
        RunRecord(1000, 1000, 0.07, None, 1.0)])

    assert run.eoc() == []
    assert [row[3] for row in run.error_rows()] == ['', '']


@pytest.mark.parametrize('l, h', [(2, 0.3), (4, 0.25)])
def test_poisson_product_is_exact(l, h):
    run = poisson_bvp('sphere', 'u2', l=l, m=5, n_perp=10, eps_normal=0.05,
        h=h)

    assert run.problem == 'poisson'
    assert run.error <= 1e-8
    assert run.fields['u'].shape == (len(run.node_set),)


def test_poisson_system_rows():
    problem = PoissonProblem()
    nodes = problem.discretize(0.3)

    A, b = problem.system(nodes)
    below = np.flatnonzero(nodes.points[:, 2] < 0)

    assert A.shape == (len(nodes), len(nodes))
    assert np.allclose(A[below].toarray(), np.eye(len(nodes))[below])
    assert np.allclose(b[below], TEST_FUNCTIONS['u2'].value(
        nodes.points[below]))


def test_heat_sphere_small():
    run = HeatSphereProblem().run(400)

    assert run.records[0].N == 400
    assert run.error < 0.1


def test_sphere_advection_small():
    run = SphereAdvectionProblem().run(400)

    assert np.isfinite(run.fields['q']).all()
    assert run.stats['max_growth'] < 10
    assert run.error < 0.5


def test_forced_heat_torus_small():
    run = ForcedHeatTorusProblem().run(600)

    assert run.records[0].N == 600
    assert np.isfinite(run.fields['u']).all()
    assert run.error < 0.2


def test_torus_advection_small():
    run = advect_torus('two_gaussian_bells', 4, 800)

    assert np.isfinite(run.fields['q']).all()
    assert run.stats['max_growth'] < 10
    assert run.error < 1.0


def test_turing_params():
    with pytest.raises(ValueError):
        TuringParams(0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0)

    params = TuringParams.from_delta_v(1.0, alpha=0.899, beta=-0.91,
        gamma=-0.899, tau1=0.02, tau2=0.2, final_time=1.0)
    f, g = params.reaction(np.zeros(3), np.zeros(3))

    assert params.delta_u == pytest.approx(0.516)
    assert not f.any() and not g.any()


def test_turing_zero_state_is_steady(sphere):
    run = turing_static(sphere, surface='sphere', l=2, n_perp=4,
        amplitude=0.0, final_time=0.1)

    assert run.error is None
    assert not run.fields['u'].any()
    assert not run.fields['v'].any()
    assert run.stats['u_std'] == 0


def test_turing_is_seeded(sphere):
    params = dict(surface='sphere', l=2, n_perp=4, final_time=0.1)

    first = turing_static(sphere, seed=3, **params)
    second = turing_static(sphere, seed=3, **params)

    assert np.array_equal(first.fields['u'], second.fields['u'])
    assert np.isfinite(first.fields['v']).all()


def test_cross_diffusion_steady_state(sphere):
    run = cross_diffusion_static(sphere, amplitude=0.0, final_time=0.01)

    assert np.allclose(run.fields['u'], 1.0, atol=1e-6)
    assert np.allclose(run.fields['w'], 0.9, atol=1e-6)
    assert set(run.stats) == {'u_min', 'u_max', 'u_std', 'w_std'}


def test_cross_diffusion_rejects_surface():
    with pytest.raises(ValueError):
        CrossDiffusionProblem(surface='tooth').run(100)


def test_turing_on_tooth():
    problem = TuringProblem(surface='tooth', l=2, n_perp=4, final_time=0.1)

    nodes = problem.discretize(400)
    assert nodes.name == 'tooth'
    assert 250 < len(nodes) < 650

    run = problem.run(400)
    assert len(run.node_set) == len(nodes)
    assert np.isfinite(run.fields['u']).all()
    assert np.isfinite(run.fields['v']).all()


def test_turing_on_spacing():
    coarse = TuringProblem(surface='dziuk', h=0.2).discretize(100)
    fine = TuringProblem(surface='dziuk', h=0.14).discretize(100)

    assert len(fine) > 1.5 * len(coarse)

    with pytest.raises(ValueError):
        TuringProblem(surface='rose').discretize(100)
