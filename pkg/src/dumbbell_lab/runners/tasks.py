"""The run tasks: each one computes, writes its CSVs and adds claim checks to the context."""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Sequence

import numpy as np

from dumbbell_lab.blowup.asymptotics import (
    beta_from_fit,
    beta_from_formula,
    fit_power,
    h_u_growth_bounds,
    mu_expansion_check,
    trace_samples,
)
from dumbbell_lab.blowup.comparisons import compare_blowup_to_profile, hat_growth_bound, nodal_sign_scan
from dumbbell_lab.blowup.rescale import left_hat, right_tilde, u_normalized
from dumbbell_lab.cross_section.angular import angular_profile, y1_eigenvalue_check
from dumbbell_lab.cross_section.radial import bessel_oracle, solve_cross_section
from dumbbell_lab.eigen.dense import DENSE_LIMIT, dense_weighted_eigenvalues
from dumbbell_lab.errors import FitError
from dumbbell_lab.fem.fields import ReflectedField
from dumbbell_lab.frequency.almgren import (
    FrequencyProfile,
    Regime,
    frequency_dumbbell,
    frequency_exterior_model,
    frequency_tube_model,
)
from dumbbell_lab.frequency.identities import (
    IdentityResult,
    coercivity_ratio,
    derivative_residual,
    fit_remainder,
    pohozaev_identity,
    r_eps_plus,
)
from dumbbell_lab.frequency.poincare import dipole_trial_quotient, poincare_optimal_constant
from dumbbell_lab.geometry.builder import build_cylinder_mesh
from dumbbell_lab.geometry.mesh_io import dump_field, dump_mesh
from dumbbell_lab.ops.artifacts import write_csv
from dumbbell_lab.ops.claims import at_least, at_most, holds, within_abs, within_rel
from dumbbell_lab.ops.run_record import ArtifactRef
from dumbbell_lab.profiles.envelopes import check_envelopes
from dumbbell_lab.profiles.junction import (
    ProfilePair,
    h_field,
    phi1_far_field,
    phi2_far_field,
    profile_bounds,
    tube_decay_check,
    tube_length_robustness,
)
from dumbbell_lab.profiles.kelvin import dipole_field, kelvin_energy_identity
from dumbbell_lab.runners.context import EpsSolution, RunContext
from dumbbell_lab.utils.logging import get_logger

logger = get_logger(__name__)

TaskFn = Callable[[RunContext], None]

# Pohozaev sample points per location (t for left/right, r for the corridor)
IDENTITY_POINTS = (("left", 1.0), ("left", 0.5), ("corridor", 0.5), ("right", 0.5), ("right", 1.0))
RATE_POINTS = (("left", 1.0), ("corridor", 0.5), ("right", 0.5))
MIN_RATE = 0.8
SCALE_FACTOR = 3.7
CORRIDOR_WALK_MULTIPLE = 4.0
LEFT_CUTOFF_MULTIPLE = 4.0
HU_LOWER_RHO = 0.5
K_TILDE_FACTORS = (0.5, 1.0, 2.0)


def _window_text(lo: float, hi: float) -> str:
    return f"[{lo:.6g}, {hi:.6g}]"


def dumbbell_samples(ctx: RunContext, eps: float) -> List[float]:
    """Frequency sample points for one eps: left, corridor and right regimes, admissible only."""
    sampling = ctx.config.sampling
    left = [r for r in sampling.left_r if -r >= eps and -r < ctx.config.R_left - 1.0]
    corridor = {round(m * eps, 12) for m in sampling.corridor_multiples if 0.0 <= m * eps <= 1.0}
    corridor.update(r for r in sampling.corridor_r if 0.0 <= r <= 1.0)
    right = [round(1.0 + t, 12) for t in sampling.right_t if eps <= t <= 3.0]
    skipped = len(sampling.left_r) - len(left) + len(sampling.right_t) - len(right)
    if skipped:
        logger.debug("eps=%.4g: %d sample point(s) outside the admissible bands", eps, skipped)
    return sorted(left) + sorted(corridor) + sorted(right)


def _frequency_profile(ctx: RunContext, sol: EpsSolution) -> FrequencyProfile:
    return frequency_dumbbell(
        sol.field,
        dumbbell_samples(ctx, sol.eps),
        eigenvalue=sol.eigenvalue,
        weight=ctx.weight,
        quad_order=ctx.config.sampling.quad_order,
    )


# --- cross-section --------------------------------------------------------------


def run_cross_section(ctx: RunContext) -> None:
    tol = ctx.config.tolerances
    resolution = ctx.config.mesh_tier.cross_section_resolution
    rows = []
    for N in sorted({3, 4, 5, ctx.N}):
        spectrum = solve_cross_section(N, resolution)
        rows.append(
            (N, resolution, spectrum.lambda1, spectrum.sqrt_lambda1, angular_profile(N).upsilon, y1_eigenvalue_check(N))
        )
        oracle = bessel_oracle(N)
        rel = tol.cross_section_rel if N != 4 else min(tol.cross_section_rel, 1e-4)
        ctx.add(
            within_rel(
                f"cross_section.lambda1.N{N}",
                f"lambda_1 of the unit ball of R^{N - 1} against the Bessel-zero oracle",
                spectrum.lambda1,
                oracle,
                rel,
                task="cross-section",
                raw=spectrum.lambda1_raw,
            )
        )
        ctx.add(
            within_abs(
                f"angular.y1_quotient.N{N}",
                "Rayleigh quotient of Y_1 on the half-sphere equals N-1",
                rows[-1][5],
                float(N - 1),
                tol.angular_abs,
                task="cross-section",
            )
        )
    ctx.add(
        within_abs(
            "angular.upsilon.N3",
            "Upsilon_3 = sqrt(2 pi / 3)",
            angular_profile(3).upsilon,
            math.sqrt(2.0 * math.pi / 3.0),
            1e-6,
            task="cross-section",
        )
    )
    ctx.outputs.append(write_csv(ctx.out_dir / "cross_section.csv", "cross_section", rows))


# --- spectra ----------------------------------------------------------------------


def run_spectra(ctx: RunContext) -> None:
    tol = ctx.config.tolerances
    ladder = ctx.ladder()
    rows = []
    distances = []
    for sol in ladder:
        n = sol.mesh.n_vertices
        for i, (lam, res) in enumerate(zip(sol.result.eigenvalues, sol.result.residuals)):
            rows.append((sol.eps, "dumbbell", i, float(lam), float(res), n))
        for spectrum in (sol.limits.plus, sol.limits.minus):
            if spectrum is None:
                continue
            for i, (lam, res) in enumerate(zip(spectrum.eigenvalues, spectrum.residuals)):
                rows.append((sol.eps, spectrum.domain, i, float(lam), float(res), n))
        distances.append(abs(sol.eigenvalue - sol.lambda_k0))
        ctx.add(
            at_most(
                f"spectra.residual.eps{sol.eps:g}",
                "relative residual of the tracked eigenpair",
                sol.residual,
                tol.eigen_residual,
                task="spectra",
            )
        )
        ctx.add(
            at_least(
                f"spectra.gap.eps{sol.eps:g}",
                "relative distance of lambda_1(D+) from the D- spectrum",
                sol.limits.gap,
                tol.gap_threshold,
                task="spectra",
                simple_gap=sol.limits.simple_gap,
            )
        )
        if sol.problem.free.shape[0] <= DENSE_LIMIT:
            dense = dense_weighted_eigenvalues(sol.mesh, ctx.weight, k=ctx.config.eigen.k + 2)
            nearest = float(dense[np.argmin(np.abs(dense - sol.eigenvalue))])
            ctx.add(
                within_rel(
                    f"spectra.dense_oracle.eps{sol.eps:g}",
                    "sparse shift-invert eigenvalue against the dense generalized solve",
                    sol.eigenvalue,
                    nearest,
                    1e-8,
                    task="spectra",
                )
            )
    decreasing = all(b < a for a, b in zip(distances, distances[1:]))
    ctx.add(
        holds(
            "spectra.convergence_trend",
            "|lambda_eps - lambda_1(D+)| strictly decreases along the eps ladder",
            decreasing,
            task="spectra",
            measured=[float(d) for d in distances],
            expected="strictly decreasing",
            window=str(list(ctx.config.eps_ladder)),
        )
    )
    ctx.outputs.append(write_csv(ctx.out_dir / "spectra.csv", "spectra", rows))


# --- frequency --------------------------------------------------------------------


def run_frequency(ctx: RunContext) -> None:
    cfg = ctx.config
    tol = cfg.tolerances
    cross = ctx.cross_section()
    N = ctx.N
    rows = []
    derivative_rows = []
    ladder = ctx.ladder()
    for sol in ladder:
        profile = _frequency_profile(ctx, sol)
        for x in profile.samples:
            rows.append((x.regime, sol.eps, x.r, x.D, x.H, x.N))
        for r in profile.dropped:
            ctx.warn("FREQ_DROPPED", f"dropped frequency sample at r={r:g}", eps=sol.eps)

        walk = [x.N for x in profile.samples if x.regime is Regime.CORRIDOR and 0.0 < x.r <= CORRIDOR_WALK_MULTIPLE * sol.eps]
        if walk:
            ctx.add(
                at_most(
                    f"frequency.corridor_walk.eps{sol.eps:g}",
                    "N_eps(r) on (0, 4 eps] stays below (1 + delta) sqrt(lambda_1(Sigma))",
                    max(walk),
                    (1.0 + tol.frequency_delta) * cross.sqrt_lambda1,
                    task="frequency",
                    window=_window_text(0.0, CORRIDOR_WALK_MULTIPLE * sol.eps),
                )
            )
        k_tilde = cfg.sampling.k_tilde
        left = [x.N for x in profile.samples if x.regime is Regime.LEFT and -k_tilde < x.r < -LEFT_CUTOFF_MULTIPLE * sol.eps]
        if left:
            ctx.add(
                at_most(
                    f"frequency.left_bound.eps{sol.eps:g}",
                    "N_eps(r) <= N - 1 + delta left of the junction",
                    max(left),
                    N - 1 + tol.frequency_delta,
                    task="frequency",
                    window=_window_text(-k_tilde, -LEFT_CUTOFF_MULTIPLE * sol.eps),
                )
            )

        report = derivative_residual(
            profile, sol.field, eigenvalue=sol.eigenvalue, weight=ctx.weight, quad_order=cfg.sampling.quad_order
        )
        for x in report.samples:
            derivative_rows.append((sol.eps, x.r, x.numeric, x.closed))

    _right_limit_claim(ctx, ladder[-1])
    _constant_frequency_oracles(ctx)
    _normalized_frequency_robustness(ctx, ladder[-1])

    ctx.outputs.append(write_csv(ctx.out_dir / "frequency.csv", "frequency", rows))
    ctx.outputs.append(write_csv(ctx.out_dir / "derivatives.csv", "derivatives", derivative_rows))


def _right_limit_claim(ctx: RunContext, sol: EpsSolution) -> None:
    t = 0.1
    band = ctx.config.tolerances.right_limit_band
    if t < sol.eps:
        ctx.warn("FREQ_RIGHT_LIMIT_SKIPPED", f"t={t} is below eps={sol.eps}")
        return
    profile = frequency_dumbbell(
        sol.field, [1.0 + t], eigenvalue=sol.eigenvalue, weight=ctx.weight, quad_order=ctx.config.sampling.quad_order
    )
    value = profile.samples[0].N if profile.samples else float("nan")
    ctx.add(
        within_abs(
            "frequency.right_limit",
            f"N_eps(1 + {t:g}) at the smallest eps lies near 1",
            value,
            1.0,
            band,
            task="frequency",
            eps=sol.eps,
        )
    )


def _constant_frequency_oracles(ctx: RunContext) -> None:
    N = ctx.N
    rel = ctx.config.tolerances.constant_frequency_rel
    cross = ctx.cross_section()
    dipole = frequency_exterior_model(dipole_field(N), [1.0, 2.0, 3.0, 4.0])
    worst = float(np.max(np.abs(dipole.N - (N - 1))))
    ctx.add(
        at_most(
            "frequency.oracle.dipole",
            "x1/|x|^N has constant exterior frequency N-1 on [1, 4]",
            worst / (N - 1),
            rel,
            task="frequency",
            window="[1, 4]",
        )
    )
    cylinder = build_cylinder_mesh(N, z_start=-8.0, z_end=1.0, n_z=180, n_s=24)
    tube = frequency_tube_model(h_field(cross), [-3.0, -2.0, -1.0, 0.0], mesh=cylinder)
    worst = float(np.max(np.abs(tube.N - cross.sqrt_lambda1)))
    ctx.add(
        at_most(
            "frequency.oracle.tube_mode",
            "exp(sqrt(lambda_1) x1) psi_1 has constant tube frequency sqrt(lambda_1(Sigma))",
            worst / cross.sqrt_lambda1,
            rel,
            task="frequency",
            window="[-3, 0]",
        )
    )


def _normalized_frequency_robustness(ctx: RunContext, sol: EpsSolution) -> None:
    r = -0.25
    if -r < sol.eps:
        return
    wide = ctx.solve_spec(
        sol.spec.model_copy(update={"R_left": 2.0 * sol.spec.R_left}),
        previous=sol.field,
        shift=ctx.config.eigen.shift_factor * sol.eigenvalue,
    )
    q = ctx.config.sampling.quad_order
    base = frequency_dumbbell(sol.field, [r], eigenvalue=sol.eigenvalue, weight=ctx.weight, quad_order=q)
    other = frequency_dumbbell(wide.field, [r], eigenvalue=wide.eigenvalue, weight=ctx.weight, quad_order=q)
    if not base.samples or not other.samples:
        ctx.warn("FREQ_ROBUSTNESS_SKIPPED", f"N_U({r:g}) was dropped", eps=sol.eps)
        return
    change = abs(other.samples[0].N - base.samples[0].N) / abs(base.samples[0].N)
    ctx.record_fit("N_U(-0.25)", base.samples[0].N, window=f"eps={sol.eps:g}", doubled_R_left=other.samples[0].N)
    ctx.add(
        at_most(
            "frequency.normalized.R_left_robustness",
            "doubling R_left changes N_U(-0.25) by less than 1%",
            change,
            0.01,
            task="frequency",
            eps=sol.eps,
        )
    )


# --- profiles ---------------------------------------------------------------------


def run_profiles(ctx: RunContext) -> None:
    cfg = ctx.config
    tol = cfg.tolerances
    N = ctx.N
    pair = ctx.profiles()
    cross = pair.cross
    mesh = pair.mesh

    bounds = profile_bounds(pair)
    ctx.add(at_least("profiles.phi1_above_ramp", "Phi_1 >= (x1 - 1)^+", bounds.phi1_minus_ramp, -1e-8, task="profiles"))
    ctx.add(at_least("profiles.phi2_above_mode", "Phi_2 >= f in the tube", bounds.phi2_minus_mode, -1e-8, task="profiles"))
    ctx.add(
        holds(
            "profiles.positive",
            "both profiles are positive at interior vertices",
            bounds.interior_min_phi1 > 0.0 and bounds.interior_min_phi2 > 0.0,
            task="profiles",
            measured=[bounds.interior_min_phi1, bounds.interior_min_phi2],
            expected="> 0",
        )
    )
    ctx.add(
        at_most(
            "profiles.harmonic",
            "discrete harmonicity of Phi_1 and Phi_2 at free vertices",
            max(bounds.harmonic_phi1, bounds.harmonic_phi2),
            1e-8,
            task="profiles",
        )
    )
    ctx.record_fit("kappa_h", bounds.kappa_h, sqrt_lambda1=bounds.sqrt_lambda1)

    decay = tube_decay_check(pair)
    ctx.add(holds("profiles.tube_decay", "Phi_1 <= C_2 exp(sqrt(lambda_1)(x1 - 1)/2) in the tube", decay.holds, task="profiles", measured=decay.worst_ratio, expected="<= 1"))
    ctx.record_fit("C2", decay.constant, window=f"x1 in [-{mesh.metadata['tube_length']:g}, 0]")
    ctx.record_fit("phi1_far_field", phi1_far_field(pair), window="|x - e1| = 4")
    ctx.record_fit("phi2_far_field", phi2_far_field(pair), window="|x - e1| = 4")

    rows = []
    tube_r = [-5.0, -4.0, -3.0, -2.0, -1.0, 0.0]
    phi1_tube = frequency_tube_model(pair.phi1, tube_r, mesh=mesh)
    for x in phi1_tube.samples:
        rows.append(("phi1", x.regime, x.r, x.D, x.H, x.N))
    ctx.add(
        within_rel(
            "profiles.phi1_tube_frequency",
            "tube frequency of Phi_1 at x1 = -3 tends to sqrt(lambda_1(Sigma))",
            phi1_tube.at(-3.0).N,
            cross.sqrt_lambda1,
            tol.profile_frequency_rel,
            task="profiles",
        )
    )
    hat = ReflectedField(pair.phi2, name="phi2_hat")
    hat_r = [1.0, 2.0, 3.0, 5.0, 8.0]
    phi2_ext = frequency_exterior_model(hat, hat_r, mesh=mesh, frame=lambda z, s: (1.0 - z, s))
    for x in phi2_ext.samples:
        rows.append(("phi2_hat", x.regime, x.r, x.D, x.H, x.N))
    ctx.add(
        within_rel(
            "profiles.phi2_hat_exterior_frequency",
            "exterior frequency of Phi_2(1 - x1, x') at r = 5 tends to N - 1",
            phi2_ext.at(5.0).N,
            float(N - 1),
            tol.profile_frequency_rel,
            task="profiles",
        )
    )

    kelvin = kelvin_energy_identity(N)
    ctx.add(
        at_most("profiles.kelvin_identity", "Kelvin energy identity for the dipole on Omega_-1", kelvin.residual, tol.kelvin_rel, task="profiles", lhs=kelvin.lhs, rhs=kelvin.rhs)
    )

    poincare = poincare_optimal_constant(N=N, radius=cfg.model_domain.exterior_radius)
    ctx.add(
        within_rel(
            "profiles.poincare_constant",
            "optimal trace Poincare constant on the exterior half-space equals N-1",
            poincare.constant,
            float(N - 1),
            tol.poincare_rel,
            task="profiles",
            correlation=poincare.correlation,
        )
    )
    ctx.add(
        within_rel(
            "profiles.poincare_trial",
            "the dipole x1/|x|^N attains the Poincare quotient N-1",
            dipole_trial_quotient(N),
            float(N - 1),
            tol.constant_frequency_rel,
            task="profiles",
        )
    )

    kwargs = cfg.model_mesh_kwargs()
    tube_length = kwargs.pop("tube_length")
    change = tube_length_robustness(N, tube_length, window=(-2.0, 1.0), **kwargs)
    ctx.add(
        at_most(
            "profiles.tube_length_robustness",
            "doubling the model tube length changes Phi_1 on [-2, 1]",
            change,
            tol.robustness_rel,
            task="profiles",
            window="[-2, 1]",
        )
    )
    ctx.outputs.append(write_csv(ctx.out_dir / "profiles.csv", "profiles", rows))
    _export_profiles(ctx, pair)


def _export_profiles(ctx: RunContext, pair: ProfilePair) -> None:
    """Model mesh and the nodal values of both profiles, in vertex order."""
    target = ctx.out_dir / "profiles"
    ctx.outputs.append(ArtifactRef.for_file(dump_mesh(pair.mesh, target / "model_mesh.txt"), kind="Mesh"))
    for profile in (pair.phi1, pair.phi2):
        path = dump_field(profile.field.values, target / f"{profile.name}.txt", name=profile.name)
        ctx.outputs.append(ArtifactRef.for_file(path, kind="Field"))


# --- blow-up ----------------------------------------------------------------------


def run_blowup(ctx: RunContext) -> None:
    cfg = ctx.config
    tol = cfg.tolerances
    N = ctx.N
    sol = ctx.smallest()
    pair = ctx.profiles()
    eps = sol.eps
    q = cfg.sampling.quad_order

    lo, hi = cfg.sampling.lambda_window(eps)
    if lo >= hi:
        ctx.warn("BLOWUP_WINDOW_EMPTY", f"lambda window [{lo:g}, {hi:g}] is empty at eps={eps:g}")
        return
    window_text = _window_text(lo, hi)
    lambdas = np.geomspace(lo, hi, cfg.sampling.n_lambdas)
    U = u_normalized(sol.field, cfg.sampling.k_tilde, q)
    H, mu_values, _ = trace_samples(U, lambdas, window=(lo, hi), quad_order=q)
    ctx.outputs.append(
        write_csv(ctx.out_dir / "h_u.csv", "h_u", [(eps, float(l), float(h), float(m)) for l, h, m in zip(lambdas, H, mu_values)])
    )

    try:
        exponent = fit_power(lambdas, H)
    except FitError as exc:
        ctx.add(holds("blowup.h_u_exponent", f"H_U power fit: {exc}", False, task="blowup", window=window_text))
    else:
        ctx.record_fit("H_U exponent", exponent.exponent, window=window_text, coefficient=exponent.coefficient, rms=exponent.rms)
        ctx.add(
            within_abs(
                "blowup.h_u_exponent",
                "log-log slope of H_U equals -2(N-1)",
                exponent.exponent,
                -2.0 * (N - 1),
                tol.exponent_abs,
                task="blowup",
                window=window_text,
            )
        )

    k_tilde = cfg.sampling.k_tilde
    if hi < k_tilde:
        bounds = h_u_growth_bounds(U, lambdas, H, k_tilde=k_tilde, delta=tol.frequency_delta, rho=HU_LOWER_RHO, quad_order=q)
        ctx.add(
            holds(
                "blowup.h_u_growth",
                f"H_U between the lam^-2(N-1) upper and the rho={HU_LOWER_RHO:g} lower power law",
                bounds.holds,
                task="blowup",
                measured={"upper_ratio": bounds.upper_ratio, "lower_ratio": bounds.lower_ratio},
                expected="upper_ratio <= 1 <= lower_ratio",
                window=window_text,
            )
        )
    else:
        ctx.warn("HU_GROWTH_SKIPPED", f"window end {hi:g} is not below k_tilde={k_tilde:g}", eps=eps)

    _beta_claims(ctx, sol, U, lambdas, (lo, hi))
    _k_tilde_sensitivity(ctx, sol, lambdas, (lo, hi))

    tilde = right_tilde(sol.field)
    hat = left_hat(sol.field, q)
    c_tilde = compare_blowup_to_profile(tilde, pair.phi1, junction=1.0)
    c_hat = compare_blowup_to_profile(hat, ReflectedField(pair.phi2, name="phi2_hat"), junction=0.0)
    ctx.record_fit("c_tilde", c_tilde.constant, window="tube slab [-1, 1] + half-annulus 1 < |x - e1| < 3")
    ctx.record_fit("c_hat", c_hat.constant, window="tube slab [0, 2] + half-annulus 1 < |x| < 3")
    ctx.add(
        at_most("blowup.tilde_vs_phi1", "u~ against c~ Phi_1, relative L2", c_tilde.residual, tol.profile_l2_rel, task="blowup", eps=eps, constant=c_tilde.constant)
    )
    ctx.add(at_least("blowup.c_tilde_positive", "c~ > 0", c_tilde.constant, 0.0, task="blowup"))
    ctx.add(
        at_most("blowup.hat_vs_phi2", "u^ against c^ Phi_2(1 - x1, x'), relative L2", c_hat.residual, tol.profile_l2_rel, task="blowup", eps=eps, constant=c_hat.constant)
    )

    nodal = [r for r in cfg.sampling.nodal_radii if eps <= r <= cfg.R_left]
    if len(nodal) < len(cfg.sampling.nodal_radii):
        ctx.warn("NODAL_RADII_SKIPPED", f"nodal radii outside [{eps:g}, {cfg.R_left:g}] skipped", eps=eps)
    for sample in nodal_sign_scan(sol.field, nodal, side="left"):
        ctx.add(
            at_least(
                f"blowup.nodal_exclusion.r{sample.radius:g}",
                "sign-normalized u_eps is positive on Gamma_r^-",
                sample.minimum,
                0.0,
                task="blowup",
                eps=eps,
            )
        )

    radii = [R for R in cfg.sampling.hat_radii if R * eps <= 1.0]
    growth = hat_growth_bound(sol.field, pair.cross, radii, q)
    ctx.add(
        holds(
            "blowup.hat_growth",
            "int over x1 = R of u^2 <= exp(4 sqrt(lambda_1)(R - 1))",
            all(g.holds for g in growth),
            task="blowup",
            measured=[g.trace for g in growth],
            expected="<= " + ", ".join(f"{g.bound:.4g}" for g in growth),
        )
    )

    rows = []
    for s in ctx.ladder():
        report = check_envelopes(s.field, pair, s.eps, r0=cfg.sampling.r0)
        rows.append((s.eps, report.c3, report.c5, report.usot_constant, report.sup_abs, report.n_points, report.upper_violations))
        ctx.record_fit(f"envelopes.eps{s.eps:g}", report.as_dict(), window=f"r0={cfg.sampling.r0:g}")
        finite = all(math.isfinite(v) for v in (report.c3, report.c5, report.usot_constant))
        ctx.add(
            holds(
                f"blowup.envelopes.eps{s.eps:g}",
                "envelope constants are finite and the linear lower bound holds",
                finite and report.usot_holds and report.upper_violations == 0,
                task="blowup",
                measured={"c3": report.c3, "c5": report.c5, "usot": report.usot_constant},
            )
        )
    ctx.outputs.append(write_csv(ctx.out_dir / "envelopes.csv", "envelopes", rows))


def _beta_claims(ctx: RunContext, sol: EpsSolution, U, lambdas: Sequence[float], window) -> None:
    rel = ctx.config.tolerances.beta_rel
    window_text = _window_text(*window)
    try:
        fit = beta_from_fit(U, lambdas, window=window, quad_order=ctx.config.sampling.quad_order)
    except FitError as exc:
        ctx.add(holds("blowup.beta_fit", f"beta from the trace asymptotics: {exc}", False, task="blowup", window=window_text))
        return
    formula = beta_from_formula(U, ctx.weight, sol.lambda_k0, mesh=sol.mesh)
    ctx.record_fit("beta_fit", fit.beta, window=window_text, beta_mu=fit.beta_mu)
    ctx.record_fit("beta_formula", formula.beta, surface=formula.surface, volume=formula.volume)
    ctx.add(
        holds(
            "blowup.beta_negative",
            "both beta estimators are negative",
            fit.beta < 0.0 and formula.beta < 0.0,
            task="blowup",
            measured=[fit.beta, formula.beta],
            expected="< 0",
            window=window_text,
        )
    )
    ctx.add(within_rel("blowup.beta_agreement", "beta from the fit against beta from the formula", fit.beta, formula.beta, rel, task="blowup", window=window_text))
    expansion = mu_expansion_check(U, ctx.weight, sol.lambda_k0, lambdas, mesh=sol.mesh, window=window)
    ctx.record_fit("mu_correction_exponent", expansion.correction_exponent, window=window_text, bracket=expansion.bracket)


def _k_tilde_sensitivity(ctx: RunContext, sol: EpsSolution, lambdas: Sequence[float], window) -> None:
    """Reported only: beta rescales with the normalization radius, the H_U exponent does not."""
    q = ctx.config.sampling.quad_order
    betas: Dict[str, float] = {}
    for factor in K_TILDE_FACTORS:
        k = ctx.config.sampling.k_tilde * factor
        if not sol.eps <= k < 1.0:
            continue
        try:
            betas[f"{k:g}"] = beta_from_fit(u_normalized(sol.field, k, q), lambdas, window=window, quad_order=q).beta
        except FitError as exc:
            logger.warning("k_tilde=%g: %s", k, exc)
            betas[f"{k:g}"] = float("nan")
    ctx.record_fit("k_tilde_sensitivity", betas, window=_window_text(*window))


# --- identities -------------------------------------------------------------------


def _identity_rows(ctx: RunContext, sol: EpsSolution, points) -> Dict[tuple, IdentityResult]:
    out = {}
    for location, value in points:
        if location == "right" and not 2.0 * sol.eps < value <= 3.0:
            continue
        result = pohozaev_identity(
            sol.field, location, value, eigenvalue=sol.eigenvalue, weight=ctx.weight, quad_order=ctx.config.sampling.quad_order
        )
        out[(location, value)] = result
    return out


def run_identities(ctx: RunContext) -> None:
    cfg = ctx.config
    N = ctx.N
    ladder = ctx.ladder()
    rows = []
    eps_values: List[float] = []
    remainders: List[float] = []
    for sol in ladder:
        for (location, value), result in _identity_rows(ctx, sol, IDENTITY_POINTS).items():
            rows.append((sol.eps, location, value, result.lhs, result.rhs, result.residual))
        eps_values.append(sol.eps)
        remainders.append(r_eps_plus(sol.field, cfg.sampling.quad_order))
        ratio = coercivity_ratio(sol.field, 2.0 * sol.eps, eigenvalue=sol.eigenvalue, weight=ctx.weight)
        ctx.add(at_least(f"identities.coercivity.eps{sol.eps:g}", "corridor energy dominates half the Dirichlet energy", ratio, 1.0, task="identities", r=2.0 * sol.eps))
    ctx.outputs.append(write_csv(ctx.out_dir / "identities.csv", "identities", rows))

    if len(eps_values) >= 2:
        try:
            fit = fit_remainder(eps_values, remainders, N)
        except FitError as exc:
            ctx.warn("REMAINDER_FIT", str(exc))
        else:
            ctx.record_fit("C8", fit.constant, window=str(eps_values), exponent=fit.exponent)

    _scale_invariance(ctx, ladder[0])
    _refinement_rates(ctx, ladder[0])


def _scale_invariance(ctx: RunContext, sol: EpsSolution) -> None:
    samples = dumbbell_samples(ctx, sol.eps)[::3]
    q = ctx.config.sampling.quad_order
    base = frequency_dumbbell(sol.field, samples, eigenvalue=sol.eigenvalue, weight=ctx.weight, quad_order=q)
    scaled = frequency_dumbbell(
        sol.field.scaled(SCALE_FACTOR), samples, eigenvalue=sol.eigenvalue, weight=ctx.weight, quad_order=q
    )
    worst = float(np.max(np.abs(scaled.N - base.N) / np.abs(base.N))) if base.samples else 0.0
    ctx.add(at_most("identities.scale_invariance", "frequency quotients are invariant under u -> c u", worst, 1e-12, task="identities"))


def _refinement_rates(ctx: RunContext, sol: EpsSolution) -> None:
    fine = ctx.solve_spec(sol.spec.refined(2), previous=sol.field, shift=ctx.config.eigen.shift_factor * sol.eigenvalue)
    coarse_res = _identity_rows(ctx, sol, RATE_POINTS)
    fine_res = _identity_rows(ctx, fine, RATE_POINTS)
    for key, result in coarse_res.items():
        if key not in fine_res:
            continue
        a, b = result.residual, fine_res[key].residual
        rate = math.log2(a / b) if a > 0.0 and b > 0.0 else float("inf")
        location, value = key
        ctx.add(
            at_least(
                f"identities.pohozaev_rate.{location}{value:g}",
                "Pohozaev residual shrinks when the mesh parameter halves",
                rate,
                MIN_RATE,
                task="identities",
                eps=sol.eps,
                coarse=a,
                fine=b,
            )
        )
    errors = []
    for s in (sol, fine):
        profile = _frequency_profile(ctx, s)
        report = derivative_residual(profile, s.field, eigenvalue=s.eigenvalue, weight=ctx.weight)
        errors.append(report.median_relative_error)
    a, b = errors
    rate = math.log2(a / b) if a > 0.0 and b > 0.0 else float("inf")
    ctx.add(
        at_least(
            "identities.derivative_rate",
            "frequency-derivative residual shrinks when the mesh parameter halves",
            rate,
            MIN_RATE,
            task="identities",
            eps=sol.eps,
            coarse=a,
            fine=b,
        )
    )


# --- registry ---------------------------------------------------------------------


TASKS: Dict[str, TaskFn] = {
    "cross-section": run_cross_section,
    "spectra": run_spectra,
    "frequency": run_frequency,
    "profiles": run_profiles,
    "blowup": run_blowup,
    "identities": run_identities,
}

FULL_REPORT_ORDER = ("cross-section", "spectra", "profiles", "frequency", "identities", "blowup")


def run_full_report(ctx: RunContext) -> None:
    for name in FULL_REPORT_ORDER:
        logger.info("Running task %s", name)
        TASKS[name](ctx)


TASKS["full-report"] = run_full_report

TASK_NAMES = tuple(TASKS)


__all__ = ["TASKS", "TASK_NAMES", "dumbbell_samples", "run_full_report"]
