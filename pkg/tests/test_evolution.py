import numpy as np
import pytest

from conftest import ALL_FAMILIES, uncoupled_law
from thermoevo import (
    BACKWARD_EULER,
    TRAPEZOIDAL,
    EvolutionProblem,
    Grid1D,
    ModelFamily,
    ModelSpec,
    RationalMatrixFunction,
    WeightedSignal,
    apply_symbol_fl,
    assemble_forcing,
    assemble_material_law,
    build_operators,
    canonical_spec,
    causality_test,
    certify_wellposedness,
    energy_functional,
    realize_state_space,
    solution_bound_check,
    solve,
    step_implicit,
    time_grid,
)
from thermoevo._integrators import exp_march_linear, simpson_weights
from thermoevo.errors import InputError


def pulse_problem(law, n_cells=16, dt=2**-9, t_max=1.0, rho=1.0,
                  scheme=BACKWARD_EULER, block="h", profile="bump",
                  center=0.25, width=0.05):
    op = build_operators(Grid1D(1.0, n_cells))
    t = time_grid(t_max, dt)
    forcing = assemble_forcing(op, t, rho, "gaussian_pulse", block, profile,
                               center=center, width=width)
    return EvolutionProblem(law, op, forcing, scheme)


def cutoff_forcing(problem, t_cut):
    samples = problem.forcing.samples.copy()
    samples[problem.forcing.t > t_cut] = 0.0
    forcing = WeightedSignal(problem.forcing.t, samples, problem.rho)
    return EvolutionProblem(problem.law, problem.op, forcing, problem.scheme)


class TestStepping:
    def test_zero_forcing_is_fixed_point(self):
        law = assemble_material_law(canonical_spec(ModelFamily.LORD_SHULMAN))
        op = build_operators(Grid1D(1.0, 8))
        t = time_grid(0.5, 2**-7)
        forcing = WeightedSignal(t, np.zeros((t.size, op.n_dof)), 1.0)
        for scheme in (BACKWARD_EULER, TRAPEZOIDAL):
            traj = solve(EvolutionProblem(law, op, forcing, scheme))
            assert np.all(traj.states == 0.0)
            assert np.all(traj.aux == 0.0)

    def test_backward_euler_order_against_matrix_exponential(self):
        # single interior node: compare with a dense exponential integrator
        # for the equivalent small linear system
        law = assemble_material_law(canonical_spec(ModelFamily.LORD_SHULMAN))
        errors = []
        for dt in (2**-6, 2**-7, 2**-8):
            problem = pulse_problem(law, n_cells=2, dt=dt, t_max=1.0,
                                    profile="mode_1", center=0.25, width=0.06)
            traj = solve(problem)
            mass = problem.mass_matrix.toarray()
            flow = -np.linalg.solve(mass, np.diag(problem.feedthrough)
                                    + problem.op.a_h.toarray())
            h_fine = dt / 64.0
            prop, w0, wm, w1 = simpson_weights(flow, h_fine)
            mass_inv = np.linalg.inv(mass)
            space = problem.forcing.samples[np.argmax(
                np.abs(problem.forcing.samples).sum(axis=1))]
            peak_amp = np.exp(-(((problem.forcing.t[np.argmax(
                np.abs(problem.forcing.samples).sum(axis=1))] - 0.25) / 0.06) ** 2))
            base = mass_inv @ (space / peak_amp)

            def g(tv):
                return np.exp(-(((tv - 0.25) / 0.06) ** 2)) * base

            y = np.zeros(problem.op.n_dof)
            reference = np.zeros_like(traj.states)
            for k in range(64 * (problem.forcing.t.size - 1)):
                tk = k * h_fine
                y = prop @ y + w0 @ g(tk) + wm @ g(tk + 0.5 * h_fine) + w1 @ g(tk + h_fine)
                if (k + 1) % 64 == 0:
                    reference[(k + 1) // 64] = y
            errors.append(np.max(np.abs(traj.states - reference))
                          / np.max(np.abs(reference)))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(orders >= 0.9)

    def test_public_step_matches_solve(self):
        law = assemble_material_law(canonical_spec(ModelFamily.DPL_I))
        problem = pulse_problem(law, n_cells=8, dt=2**-7, t_max=0.25)
        traj = solve(problem)
        u1, x1 = step_implicit(problem, traj.states[0], traj.aux[0],
                               problem.forcing.samples[1], problem.forcing.samples[0])
        np.testing.assert_array_equal(u1, traj.states[1])
        np.testing.assert_array_equal(x1, traj.aux[1])

    def test_linearity_of_solve(self):
        law = uncoupled_law(ModelFamily.GREEN_NAGHDI_III)
        base = pulse_problem(law, n_cells=8, dt=2**-8, t_max=0.5)
        f1 = base.forcing
        rng = np.random.default_rng(7)
        f2 = WeightedSignal(f1.t, rng.standard_normal(f1.samples.shape) * 0.1, f1.rho)
        alpha, beta = 2.0, -0.7
        combo = WeightedSignal(f1.t, alpha * f1.samples + beta * f2.samples, f1.rho)
        sol_combo = solve(EvolutionProblem(law, base.op, combo, base.scheme))
        sol_1 = solve(EvolutionProblem(law, base.op, f1, base.scheme))
        sol_2 = solve(EvolutionProblem(law, base.op, f2, base.scheme))
        want = alpha * sol_1.states + beta * sol_2.states
        scale = np.max(np.abs(want))
        assert np.max(np.abs(sol_combo.states - want)) <= 1e-10 * scale

    @pytest.mark.parametrize("family", ALL_FAMILIES)
    def test_unconditional_factorization(self, family):
        law = assemble_material_law(canonical_spec(family))
        op = build_operators(Grid1D(1.0, 16))
        for exponent in range(6, 13):
            dt = 2.0**-exponent
            t = time_grid(4 * dt, dt)
            forcing = WeightedSignal(t, np.zeros((t.size, op.n_dof)), 1.0)
            for scheme in (BACKWARD_EULER, TRAPEZOIDAL):
                problem = EvolutionProblem(law, op, forcing, scheme)
                problem._stepper  # factorization must succeed

    def test_coupled_lag_model_self_convergence(self):
        # the spectral reference excludes coupled laws; the coupled path is
        # checked by Richardson self-convergence of the marching scheme
        law = assemble_material_law(canonical_spec(ModelFamily.GREEN_LINDSAY))
        trajectories = []
        for dt in (2**-7, 2**-8, 2**-9):
            problem = pulse_problem(law, n_cells=8, dt=dt, t_max=0.5,
                                    scheme=TRAPEZOIDAL, block="f")
            trajectories.append(solve(problem).states)
        diffs = [
            np.max(np.abs(trajectories[0] - trajectories[1][::2])),
            np.max(np.abs(trajectories[1] - trajectories[2][::2])),
        ]
        order = np.log2(diffs[0] / diffs[1])
        assert order >= 1.9

    def test_per_cell_density_runs(self):
        spec = ModelSpec(ModelFamily.CLASSICAL, {
            "rho0": list(np.linspace(1.0, 2.0, 16)), "nu": 1.0, "C": 1.0,
            "Gamma": 0.5, "kappa": 1.0})
        law = assemble_material_law(spec)
        problem = pulse_problem(law, n_cells=16, dt=2**-8, t_max=0.5)
        traj = solve(problem)
        assert np.all(np.isfinite(traj.states))
        energy = energy_functional(traj)
        assert np.all(energy >= 0.0)


class TestEnergy:
    def test_trapezoidal_conserves_after_cutoff(self):
        law = uncoupled_law(ModelFamily.GREEN_NAGHDI_II)
        problem = cutoff_forcing(
            pulse_problem(law, n_cells=16, dt=2**-9, t_max=2.0, scheme=TRAPEZOIDAL),
            t_cut=0.5)
        energy = energy_functional(solve(problem))
        start = np.searchsorted(problem.forcing.t, 0.5) + 1
        drift = np.max(np.abs(energy[start:] - energy[start])) / energy[start]
        assert drift <= 1e-10

    @pytest.mark.parametrize("family", [
        ModelFamily.LORD_SHULMAN, ModelFamily.CLASSICAL,
        ModelFamily.GREEN_NAGHDI_I, ModelFamily.GREEN_NAGHDI_II])
    def test_backward_euler_monotone_after_cutoff(self, family):
        law = assemble_material_law(canonical_spec(family))
        problem = cutoff_forcing(
            pulse_problem(law, n_cells=16, dt=2**-9, t_max=2.0), t_cut=0.5)
        energy = energy_functional(solve(problem))
        start = np.searchsorted(problem.forcing.t, 0.5) + 1
        increases = np.diff(energy[start:])
        assert np.all(increases <= 64 * np.finfo(float).eps * np.max(energy))

    def test_backward_euler_dissipation_identity(self):
        # Delta E = -2 dt <D U+, U+> - <M dU, dU> holds step by step for
        # constant-coefficient zero-order parts (no auxiliary states)
        law = assemble_material_law(canonical_spec(ModelFamily.LORD_SHULMAN))
        problem = cutoff_forcing(
            pulse_problem(law, n_cells=8, dt=2**-8, t_max=1.0), t_cut=0.3)
        traj = solve(problem)
        energy = energy_functional(traj)
        h = problem.op.grid.h
        m = problem.mass_matrix.toarray()
        d = problem.feedthrough
        start = np.searchsorted(problem.forcing.t, 0.3) + 1
        for k in range(start, traj.states.shape[0] - 1):
            u_next = traj.states[k + 1]
            du = u_next - traj.states[k]
            want = -2.0 * problem.dt * h * u_next @ (d * u_next) - h * du @ (m @ du)
            got = energy[k + 1] - energy[k]
            assert got == pytest.approx(want, abs=1e-12 * max(energy[start], 1e-30))

    def test_zero_states_zero_energy(self):
        law = assemble_material_law(canonical_spec(ModelFamily.CLASSICAL))
        op = build_operators(Grid1D(1.0, 8))
        t = time_grid(0.25, 2**-7)
        forcing = WeightedSignal(t, np.zeros((t.size, op.n_dof)), 1.0)
        energy = energy_functional(solve(EvolutionProblem(law, op, forcing)))
        assert np.all(energy == 0.0)


class TestDerivedFields:
    @pytest.mark.parametrize("scheme", [BACKWARD_EULER, TRAPEZOIDAL])
    def test_stress_strain_temperature_relation(self, scheme):
        # sigma = C eps - Gamma (averaged Theta) holds to round-off when the
        # displacement uses the scheme-consistent antiderivative
        law = assemble_material_law(canonical_spec(ModelFamily.LORD_SHULMAN))
        problem = pulse_problem(law, n_cells=16, dt=2**-8, t_max=0.5,
                                scheme=scheme, block="f")
        traj = solve(problem)
        eps = traj.strain().samples
        sigma = traj.block("sigma").samples
        theta_faces = traj.block("theta_big").samples @ problem.op.node_to_face.T.toarray()
        want = 1.0 * eps - 0.5 * theta_faces
        scale = max(np.max(np.abs(sigma)), 1e-30)
        assert np.max(np.abs(sigma - want)) <= 1e-10 * scale

    def test_entropy_runs_on_trajectory(self):
        law = assemble_material_law(canonical_spec(ModelFamily.GREEN_LINDSAY))
        problem = pulse_problem(law, n_cells=8, dt=2**-8, t_max=0.5)
        eta = solve(problem).entropy()
        assert eta.samples.shape == (problem.forcing.t.size, 7)
        assert np.all(np.isfinite(eta.samples))

    def test_csv_export(self, tmp_path):
        law = assemble_material_law(canonical_spec(ModelFamily.CLASSICAL))
        problem = pulse_problem(law, n_cells=4, dt=2**-6, t_max=0.25)
        written = solve(problem).export_csv(tmp_path)
        names = sorted(p.name for p in written)
        assert names == sorted([
            "v.csv", "sigma.csv", "theta_big.csv", "q.csv",
            "u.csv", "epsilon.csv", "theta.csv", "eta.csv", "energy.csv"])
        header = (tmp_path / "v.csv").read_text().splitlines()[0]
        assert header == "t," + ",".join(f"x_{i}" for i in range(3))


class TestCausality:
    def test_marching_is_exactly_causal(self):
        law = assemble_material_law(canonical_spec(ModelFamily.DPL_II))
        op = build_operators(Grid1D(1.0, 16))
        t = time_grid(2.0, 2**-8)
        forcing = assemble_forcing(op, t, 1.0, "delayed_step", "h", "bump", delay=0.5)
        for scheme in (BACKWARD_EULER, TRAPEZOIDAL):
            result = causality_test(EvolutionProblem(law, op, forcing, scheme), 0.5)
            assert not result.skipped
            assert result.leakage == 0.0

    def test_support_touching_start_is_skipped(self):
        law = assemble_material_law(canonical_spec(ModelFamily.CLASSICAL))
        problem = pulse_problem(law, n_cells=8, dt=2**-7, t_max=0.5,
                                center=0.1, width=0.05)
        result = causality_test(problem, 0.1)
        assert result.skipped
        assert "window start" in result.reason

    def test_laplace_path_leakage_small(self):
        # scalar relaxed flux law q = M(d0^-1) g with M(z) = z/(a0 + z),
        # solved through the frequency domain on a delayed smooth input
        a0 = 1.0
        sym = RationalMatrixFunction((np.zeros((1, 1)), np.eye(1)), np.array([a0, 1.0]))
        t = 2**-10 * np.arange(int(6 / 2**-10) + 1)
        x = (t - 2.0) / 0.7
        samples = np.zeros_like(t)
        inside = np.abs(x) < 1.0
        samples[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
        sig = WeightedSignal(t, samples, 1.0)
        out = apply_symbol_fl(sym, sig)
        peak = np.max(np.abs(out.samples))
        leak = np.max(np.abs(out.samples[t < 1.3 - 2 * sig.dt]))
        assert leak <= 1e-6 * peak
        # two-path agreement against the realization march
        real = realize_state_space(sym)
        states = exp_march_linear(real.a, real.b, sig.samples, sig.dt)
        direct = sig.samples @ real.d.T + states @ real.c.T
        assert np.max(np.abs(direct - out.samples)) <= 1e-6 * peak


class TestBoundCheck:
    def test_classical_pulse_within_bound(self):
        law = assemble_material_law(canonical_spec(ModelFamily.CLASSICAL))
        problem = pulse_problem(law, n_cells=32, dt=2**-9, t_max=4.0, rho=4.0,
                                center=0.2, width=0.05)
        report = certify_wellposedness(law)
        result = solution_bound_check(problem, report)
        assert result.window_ok
        assert result.lhs <= result.rhs * 1.05

    def test_requires_satisfied_verdict(self):
        from conftest import negated_law

        law = negated_law(ModelFamily.DPL_I)
        problem = pulse_problem(law, n_cells=8, dt=2**-7, t_max=0.5)
        report = certify_wellposedness(law)
        with pytest.raises(InputError):
            solution_bound_check(problem, report)

    def test_zero_forcing_gives_zero_on_both_sides(self):
        law = assemble_material_law(canonical_spec(ModelFamily.CLASSICAL))
        op = build_operators(Grid1D(1.0, 8))
        t = time_grid(1.0, 2**-7)
        problem = EvolutionProblem(
            law, op, WeightedSignal(t, np.zeros((t.size, op.n_dof)), 2.0))
        result = solution_bound_check(problem, certify_wellposedness(law))
        assert result.lhs == 0.0 and result.rhs == 0.0
        assert result.ok

    def test_forcing_homogeneity(self):
        law = assemble_material_law(canonical_spec(ModelFamily.LORD_SHULMAN))
        problem = pulse_problem(law, n_cells=8, dt=2**-8, t_max=4.0, rho=4.0,
                                center=0.2, width=0.05)
        report = certify_wellposedness(law)
        res1 = solution_bound_check(problem, report)
        doubled = EvolutionProblem(
            law, problem.op,
            WeightedSignal(problem.forcing.t, 2.0 * problem.forcing.samples, problem.rho),
            problem.scheme)
        res2 = solution_bound_check(doubled, report)
        assert res2.lhs == pytest.approx(2.0 * res1.lhs, rel=1e-12)
        assert res2.rhs == pytest.approx(2.0 * res1.rhs, rel=1e-12)


class TestValidation:
    def test_component_count_checked(self):
        law = assemble_material_law(canonical_spec(ModelFamily.CLASSICAL))
        op = build_operators(Grid1D(1.0, 8))
        t = time_grid(0.25, 2**-6)
        with pytest.raises(InputError):
            EvolutionProblem(law, op, WeightedSignal(t, np.zeros((t.size, 3)), 1.0))

    def test_grid_must_start_at_zero(self):
        law = assemble_material_law(canonical_spec(ModelFamily.CLASSICAL))
        op = build_operators(Grid1D(1.0, 8))
        t = 1.0 + 2**-6 * np.arange(17)
        with pytest.raises(InputError):
            EvolutionProblem(law, op, WeightedSignal(t, np.zeros((t.size, op.n_dof)), 1.0))

    def test_cell_count_mismatch(self):
        spec = ModelSpec(ModelFamily.CLASSICAL, {
            "rho0": [1.0, 2.0, 3.0], "nu": 1.0, "C": 1.0, "Gamma": 0.0, "kappa": 1.0})
        law = assemble_material_law(spec)
        op = build_operators(Grid1D(1.0, 8))
        t = time_grid(0.25, 2**-6)
        with pytest.raises(InputError):
            EvolutionProblem(law, op, WeightedSignal(t, np.zeros((t.size, op.n_dof)), 1.0))
