"""Job runners behind the CLI.

Each method runs one action, writes its artifacts into the output directory
and returns the run manifest, which is also written as ``manifest.json``.
"""

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from src import carousel, curves, elliptic, hill, hyperbolic, lame, plots, polygons
from src.artifacts import read_json, write_csv, write_json, write_manifest
from src.config import Config
from src.errors import DomainError, SBCError, UnsupportedError
from src.models import (
    AngleRecord,
    CurveDocument,
    DeformationDocument,
    DeformationStepRecord,
    MonodromyDocument,
    PolygonDocument,
    PotentialDocument,
    RigidityDocument,
    RunManifest,
)

logger = logging.getLogger(__name__)

ELLIPTIC_FUNCTIONS = {"wp": elliptic.wp, "zeta": elliptic.zeta, "sigma": elliptic.sigma,
                      "wp_prime": elliptic.wp_prime}


class JobService:
    """Runs CLI actions against a fixed configuration."""

    def __init__(self, config: Config, out_dir: Path | None = None) -> None:
        self.config = config
        self.out_dir = Path(out_dir if out_dir is not None else config.output_dir)
        plots.configure(config.svg_hashsalt)

    def _path(self, name: str) -> Path:
        return self.out_dir / name

    def _finish(
        self,
        command: str,
        parameters: dict[str, Any],
        residuals: dict[str, float] | None = None,
        results: dict[str, Any] | None = None,
        outputs: Sequence[Path] = (),
    ) -> RunManifest:
        manifest = RunManifest(
            command=command,
            parameters=parameters,
            config=self.config.model_dump(),
            residuals={key: float(value) for key, value in (residuals or {}).items()},
            results=results or {},
            outputs=sorted(str(Path(p).relative_to(self.out_dir)) for p in outputs),
        )
        write_manifest(self.out_dir, manifest)
        logger.info("Job finished", extra={"command": command, "outputs": len(manifest.outputs)})
        return manifest

    def _load_curve(self, path: Path) -> curves.CentroaffineCurve:
        return read_json(path, CurveDocument).to_curve()

    def _write_curve(self, name: str, curve: curves.CentroaffineCurve) -> Path:
        return write_json(self._path(name), CurveDocument.from_curve(curve))

    # elliptic

    def elliptic_eval(
        self, omega: float, omega_prime_im: float, fn: str, points: Sequence[complex]
    ) -> list[complex]:
        if fn not in ELLIPTIC_FUNCTIONS:
            raise UnsupportedError(f"unknown elliptic function {fn!r}")
        lattice = elliptic.lattice_from_halfperiods(omega, omega_prime_im)
        values = [complex(ELLIPTIC_FUNCTIONS[fn](z, lattice)) for z in points]
        self._finish(
            "elliptic eval",
            {"omega": omega, "omega_prime_im": omega_prime_im, "fn": fn,
             "z": [[z.real, z.imag] for z in points]},
            residuals={"legendre": lattice.legendre_residual()},
            results={"values": [[v.real, v.imag] for v in values], "g2": lattice.g2,
                     "g3": lattice.g3},
        )
        return values

    # hill

    def _potential(self, potential: Path | None, curve: Path | None) -> hill.PeriodicPotential:
        if potential is not None:
            return hill.PeriodicPotential(np.array(read_json(potential, PotentialDocument).samples))
        if curve is not None:
            return hill.curvature_of(self._load_curve(curve))
        raise DomainError("either a potential file or a curve file is required")

    def hill_lambda0(self, potential: Path | None, curve: Path | None = None) -> RunManifest:
        p = self._potential(potential, curve)
        lam0 = hill.lambda0(p)
        return self._finish(
            "hill lambda0",
            {"potential": str(potential) if potential else None,
             "curve": str(curve) if curve else None},
            results={"lambda0": lam0, "P": p.mean_value, "borg": lam0 <= -p.mean_value + 1e-10},
        )

    def hill_cmax(self, potential: Path | None, curve: Path | None = None) -> RunManifest:
        p = self._potential(potential, curve)
        lam0 = hill.lambda0(p)
        return self._finish(
            "hill cmax",
            {"potential": str(potential) if potential else None,
             "curve": str(curve) if curve else None},
            results={"lambda0": lam0, "c_max": hill.c_max(p, lam0)},
        )

    def hill_crelate(self, curve_path: Path, c: float) -> RunManifest:
        gamma = self._load_curve(curve_path)
        p = hill.curvature_of(gamma)
        f = hill.riccati_periodic(p, c)
        if f is None:
            raise DomainError(f"|c| = {abs(c)} exceeds c_max; no closed c-related curve exists")
        delta = hill.c_related(gamma, f, c)
        middle = hill.middle_curve(gamma, delta)
        outputs = [
            self._write_curve("delta.json", delta),
            plots.curve_figure(gamma, self._path("crelate.svg"), middle=middle.samples),
        ]
        return self._finish(
            "hill crelate",
            {"curve": str(curve_path), "c": c},
            residuals={"riccati": hill.riccati_residual(p, f, c),
                       "alignment": middle.alignment_residual},
            outputs=outputs,
        )

    # curves

    def curve_verify(self, curve_path: Path, alpha: float) -> RunManifest:
        curve = self._load_curve(curve_path)
        certificate = curves.verify_self_backlund(curve, alpha)
        return self._finish(
            "curve verify",
            {"curve": str(curve_path), "alpha": alpha},
            residuals={"determinant": certificate.residual,
                       "wronskian": curve.wronskian_residual()},
            results={"c": certificate.c, "accepted": certificate.accepted},
        )

    def curve_roots(self, kind: str, u: float, interval: tuple[float, float]) -> RunManifest:
        roots = curves.rotation_equation_roots(kind, u, interval)
        return self._finish(
            "curve roots",
            {"kind": kind, "u": u, "interval": list(interval)},
            results={"roots": roots, "count": len(roots)},
        )

    def curve_wegner(self, a: float, b: float, c: float, r0: float) -> RunManifest:
        result = curves.wegner_curve(a, b, c, r0, size=self.config.grid_size)
        outputs = [
            self._write_curve("wegner.json", result.curve),
            plots.curve_figure(result.curve, self._path("wegner.svg")),
        ]
        return self._finish(
            "curve wegner",
            {"a": a, "b": b, "c": c, "r0": r0},
            residuals={"curvature": result.curvature_residual,
                       "euclidean": result.euclidean_residual},
            outputs=outputs,
        )

    # lame

    def lame_build(self, k: int, n: int, m: int, omega_prime_im: float) -> RunManifest:
        params = lame.solve_a(k, n, m, omega_prime_im)
        built = lame.build_curve(params, self.config.grid_size)
        angles = lame.self_backlund_angles(params, built)
        alpha = angles[0].alpha if angles else None
        middle = hill.middle_curve(built.curve, built.curve.shifted(alpha)) if angles else None
        outputs = [
            self._write_curve("curve.json", built.curve),
            plots.curve_figure(built.curve, self._path("curve.svg"), alpha=alpha,
                               middle=middle.samples if middle else None),
        ]
        return self._finish(
            "lame build",
            {"k": k, "n": n, "m": m, "omega_prime_im": omega_prime_im},
            residuals={"closure": built.closure_residual,
                       "quasi_periodicity": built.quasi_periodicity_residual,
                       "wronskian_variation": built.wronskian_variation,
                       "quantization": abs(params.quantization() - 1j * params.target)},
            results={"a": [params.a.real, params.a.imag], "winding": built.winding,
                     "wronskian_scale": built.wronskian_scale,
                     "angles": [AngleRecord(alpha=x.alpha, c=x.c, residual=x.residual)
                                .model_dump() for x in angles]},
            outputs=outputs,
        )

    def lame_angles(self, k: int, n: int, m: int, omega_prime_im: float) -> RunManifest:
        params = lame.solve_a(k, n, m, omega_prime_im)
        angles = lame.self_backlund_angles(params)
        records = [AngleRecord(alpha=x.alpha, c=x.c, residual=x.residual) for x in angles]
        return self._finish(
            "lame angles",
            {"k": k, "n": n, "m": m, "omega_prime_im": omega_prime_im},
            residuals={"determinant": max((x.residual for x in angles), default=0.0)},
            results={"angles": [r.model_dump() for r in records], "count": len(records)},
        )

    def lame_deform(self, k: int, s_steps: Sequence[float], omega_prime_im: float) -> RunManifest:
        family = lame.deformation_family(k, s_steps, omega_prime_im, self.config.grid_size,
                                         self.config.threads)
        outputs = []
        records = []
        for index, step in enumerate(family.steps):
            name = f"deform_k{k}_{index}.json"
            outputs.append(self._write_curve(name, step.curve.curve))
            records.append(DeformationStepRecord(s=step.s, nome=step.nome,
                                                 alphas=[a.alpha for a in step.angles],
                                                 curve_file=name))
        document = DeformationDocument(k=k, steps=records, limits=family.limits,
                                       infinitesimal=family.infinitesimal)
        outputs.append(write_json(self._path(f"deform_k{k}.json"), document))
        outputs.append(plots.overlay_figure([s.curve.curve for s in family.steps],
                                            [f"s={s.s:g}" for s in family.steps],
                                            self._path(f"deform_k{k}.svg")))
        return self._finish(
            "lame deform",
            {"k": k, "s_steps": list(s_steps), "omega_prime_im": omega_prime_im},
            residuals={"limit": max(abs(a - b) for a, b in zip(family.limits,
                                                               family.infinitesimal))},
            results={"limits": family.limits, "infinitesimal": family.infinitesimal},
            outputs=outputs,
        )

    # polygons

    def poly_build(self, hill_coeffs: Sequence[float]) -> RunManifest:
        polygon = polygons.from_hill(np.array(hill_coeffs, dtype=float))
        if polygon is None:
            raise DomainError("Hill coefficients do not close up (monodromy is not −Id)")
        table = polygons.frieze(polygon)
        outputs = [
            write_json(self._path("polygon.json"), PolygonDocument.from_polygon(polygon)),
            plots.polygon_figure(polygon, self._path("polygon.svg")),
        ]
        return self._finish(
            "poly build",
            {"hill": list(hill_coeffs)},
            residuals={"ptolemy": polygons.ptolemy_residual(polygon)},
            results={"frieze_positive": table.positive, "regular": polygon.is_regular()},
            outputs=outputs,
        )

    def poly_construct(self, n: int, k: int) -> RunManifest:
        polygon = polygons.construct_nk(n, k, self.config.dilation)
        if polygon is None:
            raise UnsupportedError(f"no explicit construction for (n, k) = ({n}, {k})")
        c = polygons.is_self_backlund(polygon, k)
        outputs = [
            write_json(self._path("polygon.json"), PolygonDocument.from_polygon(polygon)),
            plots.polygon_figure(polygon, self._path("polygon.svg"), k=k),
        ]
        return self._finish("poly construct", {"n": n, "k": k, "dilation": self.config.dilation},
                            results={"c": c, "regular": polygon.is_regular()}, outputs=outputs)

    def poly_backlund(self, polygon_path: Path, q1: tuple[float, float]) -> RunManifest:
        polygon = read_json(polygon_path, PolygonDocument).to_polygon()
        result = polygons.backlund_transform(polygon, np.array(q1))
        outputs = [write_csv(self._path("backlund.csv"), ["x", "y"], result.points)]
        return self._finish(
            "poly backlund",
            {"polygon": str(polygon_path), "q1": list(q1)},
            residuals={"gap": result.gap},
            results={"closed": result.closed, "rail": result.rail},
            outputs=outputs,
        )

    def poly_recut(self, polygon_path: Path, iterations: int) -> RunManifest:
        polygon = read_json(polygon_path, PolygonDocument).to_polygon()
        orbit = polygons.recut_orbit(polygon, iterations, record=True)
        outputs = [
            write_json(self._path("recut.json"), PolygonDocument.from_polygon(orbit.final)),
            write_csv(self._path("recut_radii.csv"), ["step", "max_radius", "min_radius"],
                      np.column_stack([np.arange(iterations + 1), orbit.max_radius,
                                       orbit.min_radius])),
        ]
        if orbit.bounded:
            outputs.append(plots.point_cloud_figure(orbit.history, self._path("recut.svg")))
        return self._finish(
            "poly recut",
            {"polygon": str(polygon_path), "iterations": iterations},
            results={"bounded": orbit.bounded, "max_radius": float(np.max(orbit.max_radius)),
                     "min_radius": float(np.min(orbit.min_radius))},
            outputs=outputs,
        )

    def poly_rigidity(self, n: int, k: int) -> RunManifest:
        report = polygons.rigidity_analysis(n, k)
        document = RigidityDocument(
            n=n,
            k=k,
            eigenvalues=[[v.real, v.imag] for v in report.eigenvalues],
            kernel_indices=list(report.kernel_indices),
            criterion_indices=list(report.criterion_indices),
            arithmetic_indices=list(report.arithmetic_indices),
            kernel_dim=report.kernel_dim,
            nontrivial=report.nontrivial,
        )
        outputs = [write_json(self._path("rigidity.json"), document)]
        return self._finish("poly rigidity", {"n": n, "k": k},
                            results={"kernel_dim": report.kernel_dim,
                                     "nontrivial": report.nontrivial},
                            outputs=outputs)

    def poly_search(self, n: int, k: int, restarts: int) -> RunManifest:
        report = polygons.search_self_backlund(n, k, restarts, self.config.seed,
                                               threads=self.config.threads)
        return self._finish(
            "poly search",
            {"n": n, "k": k, "restarts": restarts},
            results={"converged": report.converged, "regular": report.regular,
                     "only_regular": report.only_regular,
                     "nonregular": [list(map(float, a)) for a in report.solutions]},
        )

    # carousel

    def _initial_polygon(self, n: int, init: Path | None, perturbation: float
                         ) -> polygons.CentroaffinePolygon:
        if init is not None:
            polygon = read_json(init, PolygonDocument).to_polygon()
            if not isinstance(polygon, polygons.CentroaffinePolygon):
                raise DomainError("carousel initial polygons need unit side determinants")
            return polygon
        if n == 5:
            return carousel.decagon_from_frieze(carousel.GOLDEN + perturbation, carousel.GOLDEN)
        return carousel.perturbed_polygon(n, perturbation, self.config.seed)

    def carousel_flow(
        self, n: int, duration: float, init: Path | None = None, perturbation: float = 0.1,
        tol: float = 1e-9, samples: int = 200,
    ) -> RunManifest:
        polygon = self._initial_polygon(n, init, perturbation)
        trajectory = carousel.flow(carousel.CarouselState.at(polygon), duration, tol, samples)
        series = trajectory.integral_series()
        vertices = trajectory.vertex_series()
        header = ["t"]
        for i in range(polygon.n):
            header += [f"x{i}", f"y{i}"]
        header += ["I", "J", "K", "H"]
        rows = np.column_stack([trajectory.times, vertices.reshape(len(vertices), -1), series])
        outputs = [
            write_csv(self._path("trajectory.csv"), header, rows),
            plots.traces_figure(vertices, self._path("trajectory.svg")),
        ]
        drift = np.max(np.abs(series - series[0]), axis=0)
        bound = carousel.radius_bound(trajectory)
        return self._finish(
            "carousel flow",
            {"n": polygon.n, "T": duration, "init": str(init) if init else None,
             "perturbation": perturbation, "tol": tol},
            residuals={"I": drift[0], "J": drift[1], "K": drift[2], "H": drift[3],
                       "projection": trajectory.max_correction},
            results={"radius_bound": bound.bound, "max_radius": bound.max_radius},
            outputs=outputs,
        )

    def carousel_close(self, lo: float, hi: float, points: int, tol: float = 1e-10
                       ) -> RunManifest:
        offsets = np.linspace(lo, hi, points)
        closure = carousel.close_carousel(offsets, tol, self.config.grid_size,
                                          self.config.threads)
        result = closure.monodromy
        document = MonodromyDocument(
            matrix=result.matrix.tolist(), trace=result.trace, angle=result.angle,
            shift_time=result.shift_time, reduced_period=result.reduced_period,
            fit_residual=result.fit_residual, section=result.section,
        )
        outputs = [
            self._write_curve("carousel.json", closure.curve),
            write_json(self._path("monodromy.json"), document),
            write_json(self._path("decagon.json"), PolygonDocument.from_polygon(closure.polygon)),
            plots.curve_figure(closure.curve, self._path("carousel.svg"),
                               alpha=np.pi / closure.polygon.n),
        ]
        return self._finish(
            "carousel close",
            {"level_scan": [lo, hi], "points": points, "tol": tol},
            residuals={"determinant": closure.certificate.residual,
                       "fit": result.fit_residual},
            results={"offset": closure.offset, "level": closure.level,
                     "c": closure.certificate.c,
                     "scan": [[s, a] for s, a in closure.scan]},
            outputs=outputs,
        )

    # dual

    def dual(self, curve_path: Path, out_name: str = "dual.csv") -> RunManifest:
        curve = self._load_curve(curve_path)
        result = hyperbolic.dual_curve(curve)
        rows = np.column_stack([curve.t, result.samples, result.kappa])
        outputs = [
            write_csv(self._path(out_name), ["t", "a", "b", "c", "kappa"], rows),
            plots.disk_figure(result.disk(), self._path("dual.svg")),
        ]
        results: dict[str, Any] = {}
        try:
            results["cusps"] = hyperbolic.cusp_count(result)
        except DomainError:
            results["cusps"] = None
        return self._finish(
            "dual",
            {"curve": str(curve_path)},
            residuals={"curvature_relation": result.curvature_relation_residual()},
            results=results,
            outputs=outputs,
        )

    # figures

    def repro(self) -> RunManifest:
        """Desk-scale versions of the figures; failures are recorded and the first is re-raised."""
        outputs: list[Path] = []
        results: dict[str, Any] = {}
        failures: list[SBCError] = []
        for name, job in (
            ("weg", self._figure_weg),
            ("eqn", self._figure_eqn),
            ("weg2", self._figure_weg2),
            ("deform", self._figure_deform),
            ("polys", self._figure_polys),
            ("carr", self._figure_carr),
            ("recut", self._figure_recut),
        ):
            try:
                outputs.extend(job())
                results[name] = "ok"
            except SBCError as e:
                logger.error("Figure failed", extra={"figure": name, "error": str(e)})
                results[name] = f"failed: {e}"
                failures.append(e)
        self._finish("repro", {}, results=results, outputs=outputs)
        if failures:
            raise failures[0]
        return read_json(self._path("manifest.json"), RunManifest)

    def _lame_figure(self, k: int, n: int, omega_prime_im: float, name: str) -> Path:
        params = lame.solve_a(k, n, 0, omega_prime_im)
        built = lame.build_curve(params, self.config.grid_size)
        angles = lame.self_backlund_angles(params, built)
        alpha = angles[0].alpha if angles else None
        middle = hill.middle_curve(built.curve, built.curve.shifted(alpha)) if angles else None
        return plots.curve_figure(built.curve, self._path(name), alpha=alpha,
                                  middle=middle.samples if middle else None)

    def _figure_weg(self) -> list[Path]:
        return [
            self._lame_figure(3, 1, self.config.omega_prime_im, "fig_weg_winding1.svg"),
            self._lame_figure(5, 3, self.config.omega_prime_im, "fig_weg_winding3.svg"),
        ]

    def _figure_eqn(self) -> list[Path]:
        u = 2.0 / 7.0
        alpha = np.linspace(1e-3, 14.0 * np.pi - 1e-3, 8001)
        roots = curves.rotation_equation_roots("tan_tan", u, (0.0, 14.0 * np.pi))
        logger.info("Rotation equation roots", extra={"u": u, "count": len(roots)})
        return [plots.graph_figure(alpha, [(np.tan(u * alpha), "tab:blue"),
                                           (u * np.tan(alpha), "tab:red")],
                                   self._path("fig_eqn.svg"), ylim=(-4.0, 4.0))]

    def _figure_weg2(self) -> list[Path]:
        return [self._lame_figure(k, 1, self.config.omega_prime_im, f"fig_weg2_k{k}.svg")
                for k in (3, 5, 7)]

    def _figure_deform(self) -> list[Path]:
        family = lame.deformation_family(4, [1.0, 0.5, 0.25, 0.1, 0.05],
                                         self.config.omega_prime_im, self.config.grid_size,
                                         self.config.threads)
        return [plots.overlay_figure([s.curve.curve for s in family.steps],
                                     [f"s={s.s:g}" for s in family.steps],
                                     self._path("fig_deform.svg"))]

    def _figure_polys(self) -> list[Path]:
        paths = []
        for n, k in ((8, 3), (8, 4), (10, 5)):
            polygon = polygons.construct_nk(n, k, self.config.dilation)
            if polygon is not None:
                paths.append(plots.polygon_figure(polygon, self._path(f"fig_polys_{n}_{k}.svg"),
                                                  k=k))
        return paths

    def _figure_carr(self) -> list[Path]:
        closure = carousel.close_carousel(np.linspace(0.05, 2.0, 16), size=self.config.grid_size,
                                          threads=self.config.threads)
        trajectory = carousel.flow(carousel.CarouselState.at(closure.polygon),
                                   closure.polygon.n * closure.monodromy.shift_time, 1e-9, 400)
        return [
            plots.curve_figure(closure.curve, self._path("fig_carr_curve.svg"),
                               alpha=np.pi / closure.polygon.n),
            plots.traces_figure(trajectory.vertex_series(), self._path("fig_carr_traces.svg")),
        ]

    def _figure_recut(self) -> list[Path]:
        angles = np.pi * np.arange(3) / 3.0 + np.array([0.0, 0.15, -0.1])
        radii = np.array([1.0, 1.3, 0.8])
        hexagon = polygons.SymmetricPolygon.from_half(
            radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
        )
        orbit = polygons.recut_orbit(hexagon, 2000, record=True)
        if not orbit.bounded:
            raise DomainError("recutting orbit escaped to infinity")
        return [plots.point_cloud_figure(orbit.history, self._path("fig_recut.svg"))]
